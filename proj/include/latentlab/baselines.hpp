#pragma once

#include "latentlab/core.hpp"
#include "latentlab/rng.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

namespace latentlab {

/// Simulation record: baselines may read sample and label, never the latent.
struct UserRecord {
  RatingSample sample;
  std::optional<BinaryLatent> latent;
  std::optional<int> label;
};

/// Number of shared ratings: |a cap b| in set mode, sum of min counts otherwise.
std::uint32_t overlap(const RatingSample& a, const RatingSample& b);

/// Overlap of every user pair with a nonzero count, keyed by i * n + j (i < j).
/// Built with an inverted index, so cost scales with co-occurrences rather than
/// with the number of pairs.
std::unordered_map<std::uint64_t, std::uint32_t> pairwise_overlaps(const std::vector<RatingSample>& users);

std::uint32_t max_pairwise_overlap(const std::vector<RatingSample>& users);

struct OverlapHistogram {
  std::vector<double> pmf_same;  ///< index tau, tau in [0, T]
  std::vector<double> pmf_diff;
  std::vector<double> ratio;     ///< Pr[diff | O >= tau] / Pr[same | O >= tau], prior Pr[same] = 1/k
  std::uint64_t same_pairs = 0;
  std::uint64_t diff_pairs = 0;
};

/// Conditional overlap distributions for same-genre and different-genre pairs
/// (s = 1 users with recorded latents). Scans all pairs when the budget allows,
/// otherwise samples pair_budget random pairs.
OverlapHistogram overlap_histogram(const std::vector<UserRecord>& users, std::uint64_t pair_budget,
                                   RngStream& rng);

inline constexpr int kAbstain = 0;  ///< labels are +-1; 0 marks an abstention

/// Majority vote over train users with overlap >= tau. Zero neighbors abstain;
/// tied votes go to the numerically smaller label.
int knn_predict_label(const std::vector<UserRecord>& train, const RatingSample& query,
                      std::uint32_t tau);

/// 1 iff at least one neighbor (overlap >= tau) rated the movie.
int knn_predict_movie(const std::vector<UserRecord>& train, const RatingSample& query,
                      std::uint32_t tau, std::uint32_t movie_id);

struct LargeTThresholds {
  double diff_max;  ///< (1/s - 1/s^2) T^2 / m
  double same_min;  ///< (1/s) T^2 / m
};

LargeTThresholds larget_thresholds(std::uint32_t s, double T, double m);

/// Exact-match table over binary latents.
class LookupTable {
 public:
  LookupTable(std::uint32_t k, std::uint32_t s) : k_(k), s_(s) {}

  /// Throws on conflicting labels for the same latent.
  void fit(const std::vector<BinaryLatent>& latents, const std::vector<int>& labels);
  std::optional<int> predict(const BinaryLatent& h) const;
  /// Fraction of the C(k,s) latent space seen during fit.
  double coverage() const;

 private:
  std::uint32_t k_, s_;
  std::map<std::vector<std::uint32_t>, int> table_;
};

/// Raw-space overlap exploiter: majority label among train users sharing a
/// movie with the query, else the global majority train label.
int supervised_baseline(const std::vector<UserRecord>& train, const RatingSample& query);

}  // namespace latentlab
