#pragma once

#include "latentlab/core.hpp"
#include "latentlab/rng.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace latentlab {

struct SimpleGraph {
  std::uint32_t n = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  ///< u < v, lexicographically sorted
  std::vector<std::uint32_t> communities;                      ///< size n when known, else empty

  std::vector<std::vector<std::uint32_t>> adjacency_lists() const;
  /// One "u v" pair per line, sorted.
  void write_edge_list(std::ostream& out) const;
};

/// Nearest-neighbor graph: edge iff the two samples share at least tau ratings.
SimpleGraph nn_graph(const std::vector<RatingSample>& samples, std::uint32_t tau);

struct BlockParams {
  double a = 0.0;    ///< same-community edge probability bound
  double b = 0.0;    ///< cross-community edge probability bound
  double phi = 0.0;  ///< matched Erdos-Renyi edge probability (a + (k-1)b)/k
  std::uint32_t k = 0;
  std::uint32_t n = 0;
};

/// a = tau (T^2/m)^tau, b = (1/2)(p/2)^tau (T^2/m)^tau; requires T^2 < m.
BlockParams block_params(double T, double m, std::uint32_t tau, double p, std::uint32_t k,
                         std::uint32_t n);

struct ContiguityCheck {
  bool holds = false;
  double lhs = 0.0;  ///< N (a-b)^2
  double rhs = 0.0;  ///< (a + (k-1) b) ln k
};

ContiguityCheck contiguity_condition(const BlockParams& params);

SimpleGraph sbm_sample(std::uint32_t n, std::uint32_t k, double q_in, double q_out, RngStream& rng);
SimpleGraph er_sample(std::uint32_t n, double phi, RngStream& rng);

struct GsbmBoundsReport {
  double max_in_prob = 0.0;   ///< largest within-genre edge frequency
  double min_out_prob = 0.0;  ///< smallest cross-genre edge frequency
  double a = 0.0, b = 0.0;
  double sigma_in = 0.0, sigma_out = 0.0;  ///< binomial scales of the extremal cells
  std::uint64_t conforming_users = 0;
  std::uint64_t conforming_pairs = 0;
  bool conforms = false;  ///< max_in <= a + 3 sigma_in and min_out >= b - 3 sigma_out
};

/// Checks the g-SBM edge-probability bounds among users whose core-movie count
/// lies in pT +- sqrt(pT) ln m (shared-core structures, s = 1).
GsbmBoundsReport verify_gsbm_bounds(const GenreStructure& structure,
                                    const std::vector<RatingSample>& samples,
                                    const std::vector<std::uint32_t>& genre_of_user,
                                    std::uint32_t tau, const BlockParams& params);

double degree_variance(const SimpleGraph& g);
double triangle_count(const SimpleGraph& g);
/// Largest-magnitude eigenvalue of A - phi_hat (J - I), by power iteration to
/// 1e-8 relative tolerance.
double top_centered_eigenvalue(const SimpleGraph& g);

using GraphGenerator = std::function<SimpleGraph(RngStream&)>;

struct DistinguishReport {
  std::map<std::string, double> auc;  ///< directional AUC per statistic
  double combined = 0.0;              ///< best fold-invariant AUC across statistics
  std::vector<std::string> stat_names;
  std::vector<std::vector<double>> stats_a;  ///< [statistic][graph]
  std::vector<std::vector<double>> stats_b;
};

/// Measures how well the fixed statistic battery separates two graph models.
DistinguishReport distinguish(const GraphGenerator& model_a, const GraphGenerator& model_b,
                              int n_graphs, std::uint64_t master_seed, int threads = 1);

/// Rank-based AUC (midranks for ties) of scores_a against scores_b.
double auc_of_scores(const std::vector<double>& scores_a, const std::vector<double>& scores_b);

}  // namespace latentlab
