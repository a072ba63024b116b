#pragma once

#include "latentlab/core.hpp"
#include "latentlab/rng.hpp"

#include <string>

namespace latentlab {

/// Movie vectors for the log-linear emission model. Rows are i.i.d. Gaussian
/// with per-coordinate variance B^2 / (4d).
struct MovieVectors {
  Mat W;                 ///< M x d, row x is the vector of movie x
  double b_scale = 0.0;  ///< B

  std::uint32_t num_movies() const { return static_cast<std::uint32_t>(W.rows()); }
  std::uint32_t dim() const { return static_cast<std::uint32_t>(W.cols()); }
};

struct LogLinearSample {
  RatingSample sample;  ///< multiset of T movie ids
  Vec latent;           ///< the unit-sphere latent that produced it
};

MovieVectors sample_movie_vectors(std::uint32_t num_movies, std::uint32_t dim, double b_scale,
                                  RngStream& rng);

/// Uniform draw from the unit sphere in R^d.
Vec sample_sphere_latent(std::uint32_t dim, RngStream& rng);

/// Z(h) = sum_x exp(<W_x, h>) over all movies, via a log-sum-exp path.
/// Requires ||h||_2 = 1 within 1e-9.
double partition_function(const MovieVectors& vectors, const Vec& h);
double log_partition_function(const MovieVectors& vectors, const Vec& h);

/// Softmax emission probabilities exp(<W_x,h>) / Z.
Vec emission_probabilities(const MovieVectors& vectors, const Vec& h);

/// T i.i.d. categorical draws from the softmax emission law.
LogLinearSample emit_loglinear(const MovieVectors& vectors, const Vec& h, std::uint32_t T,
                               RngStream& rng);

/// The same draws in draw order; prefixes are valid smaller emissions.
std::vector<std::uint32_t> loglinear_draw_sequence(const MovieVectors& vectors, const Vec& h,
                                                   std::uint32_t T, RngStream& rng);

/// Analytic ensemble mean of Z: M * exp(B^2 / (8d)).
double analytic_mean_partition(std::uint32_t num_movies, std::uint32_t dim, double b_scale);

struct ZConcentrationReport {
  double mean_ratio = 0.0;   ///< mean of Z(h) / E[Z]
  double max_dev = 0.0;      ///< max |Z(h)/E[Z] - 1|
  double frac_within = 0.0;  ///< fraction of latents with |ratio - 1| <= epsilon
  double epsilon = 0.0;
  int n_latents = 0;
};

ZConcentrationReport z_concentration_report(const MovieVectors& vectors, int n_latents,
                                            double epsilon, RngStream& rng);

/// Flat binary layout: magic, M, d, B, then row-major 64-bit floats.
void save_movie_vectors(const std::string& path, const MovieVectors& vectors);
MovieVectors load_movie_vectors(const std::string& path);

}  // namespace latentlab
