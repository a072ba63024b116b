#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace latentlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class Norm { L1, L2 };

/// Relative estimation error ||h_est - h_true|| / ||h_true|| in the chosen norm.
double norm_error(const Vec& h_est, const Vec& h_true, Norm norm);

/// Guaranteed sup-norm deviation of an alpha-Lipschitz classifier fed encoder
/// output with the given relative error factor: error_factor * alpha * h_norm.
double lipschitz_transfer_bound(double alpha, double error_factor, double h_norm);

enum class StructureVariant { SharedCore, DisjointPartition, BoundedOverlap };

std::string to_string(StructureVariant v);

/// Movie/genre incidence: k genres of m movies each over M movies total.
struct GenreStructure {
  std::uint32_t num_movies = 0;                     ///< M
  std::vector<std::vector<std::uint32_t>> genres;   ///< sorted ids, each of size m
  StructureVariant variant = StructureVariant::DisjointPartition;
  double core_fraction = 0.0;  ///< p, shared-core only
  double max_overlap = 0.0;    ///< delta, bounded-overlap only

  std::uint32_t num_genres() const { return static_cast<std::uint32_t>(genres.size()); }
  std::uint32_t genre_size() const { return genres.empty() ? 0 : static_cast<std::uint32_t>(genres[0].size()); }

  /// Checks the variant invariant by direct set arithmetic; throws on violation.
  void validate() const;

  /// Sorted union of the genres selected by `genre_ids`.
  std::vector<std::uint32_t> genre_union(const std::vector<std::uint32_t>& genre_ids) const;
};

/// Binary s-sparse latent: the set of genres a user likes.
struct BinaryLatent {
  std::uint32_t num_genres = 0;           ///< k
  std::vector<std::uint32_t> genre_ids;   ///< sorted, size s

  std::uint32_t sparsity() const { return static_cast<std::uint32_t>(genre_ids.size()); }
  /// 0/1 indicator vector of length k.
  Vec indicator() const;
  /// Uniform mixing vector: weight 1/s on each liked genre.
  Vec simplex() const;
};

enum class ReplacementMode { Set, Multiset };

/// A user's observable: T movie ids (sorted; duplicates allowed in multiset mode).
struct RatingSample {
  std::vector<std::uint32_t> movie_ids;
  ReplacementMode mode = ReplacementMode::Set;

  std::uint32_t size() const { return static_cast<std::uint32_t>(movie_ids.size()); }
  /// Dense bag-of-words view of length num_movies.
  std::vector<std::uint32_t> counts(std::uint32_t num_movies) const;
  void validate() const;
};

/// Empirical encoder quality per one (error factor, success probability) pair.
struct ValidityReport {
  double error_factor = 0.0;   ///< epsilon the trials were scored against
  double success_prob = 0.0;   ///< fraction of trials with error <= epsilon
  Norm norm = Norm::L1;
  int trials = 0;
  int successes = 0;
  double err_q50 = 0.0, err_q90 = 0.0, err_q99 = 0.0;
  std::vector<double> errors;  ///< per-trial error factors, trial order
};

/// Runs fn(i) for i in [0, n) on `threads` threads; fn must only touch
/// index-i state so the result is independent of the scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// Default worker count: LATENTLAB_THREADS if set, else hardware concurrency.
int default_thread_count();

}  // namespace latentlab
