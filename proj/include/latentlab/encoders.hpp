#pragma once

#include "latentlab/core.hpp"
#include "latentlab/loglinear.hpp"
#include "latentlab/rng.hpp"

#include <nlohmann/json_fwd.hpp>

#include <functional>
#include <utility>

namespace latentlab {

/// Left inverse B of the movie-genre matrix with its entrywise-max certificate.
struct PseudoInverse {
  Mat B;                         ///< k x M
  double lambda = 0.0;           ///< max |B_ij|
  double residual = 0.0;         ///< max |(BA - I)_ij|
  std::uint64_t source_hash = 0; ///< hash of the structure A was built from (0 if none)
};

/// Builds the low-variance pseudo-inverse: each row solves the linear program
/// min ||b||_inf subject to A^T b = e_j. Throws if the assembled residual
/// exceeds tol or A is rank-deficient.
PseudoInverse low_variance_pseudoinverse(const Mat& A, double tol = 1e-6);

nlohmann::json pseudoinverse_to_json(const PseudoInverse& pinv);
PseudoInverse pseudoinverse_from_json(const nlohmann::json& j);

/// Entrywise keep-or-zero: entries >= tau kept, entries strictly below zeroed.
Vec threshold_map(const Vec& z, double tau);

struct EncoderOutput {
  Vec h_est;          ///< k-vector (linear) or unit d-vector (log-linear)
  Vec pre_threshold;  ///< unthresholded (1/T) B x, linear encoder only
  double sum_norm = 0.0;  ///< ||sum W_x||_2, log-linear encoder only
};

/// Thresholded pseudo-inverse encoder: phi_tau((1/T) B x) with
/// tau = 2 lambda sqrt(ln k / T).
EncoderOutput linear_encode(const PseudoInverse& pinv, const RatingSample& x);

/// Normalized-sum encoder: sum of emitted movie vectors over its l2 norm.
EncoderOutput loglinear_encode(const MovieVectors& vectors, const RatingSample& x);

/// One trial: returns (estimate, truth) drawn with the given stream.
using EncoderTrial = std::function<std::pair<Vec, Vec>(RngStream&)>;

/// Runs n_trials independent trials (stream_id = stream_base + trial index) and
/// scores them against the error factor: success iff norm_error <= epsilon.
ValidityReport measure_encoder(const EncoderTrial& trial, int n_trials, double epsilon, Norm norm,
                               std::uint64_t master_seed, std::uint64_t stream_base = 0,
                               int threads = 1);

struct ConcentrationReport {
  double signal_sum = 0.0;      ///< sum_i <W_{x_i}, h> for the sample
  double offaxis_max_sq = 0.0;  ///< max_j (sum_i <W_{x_i}, u_j>)^2 over a completion of h
  double ratio = 0.0;           ///< offaxis_max_sq * d / signal_sum^2
};

/// Signal/off-axis decomposition of the vector sums behind the normalized-sum
/// encoder, one report per sample.
std::vector<ConcentrationReport> loglinear_concentration_report(const MovieVectors& vectors,
                                                                const std::vector<RatingSample>& samples,
                                                                const Vec& h);

}  // namespace latentlab
