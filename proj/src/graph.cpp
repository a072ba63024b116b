#include "latentlab/graph.hpp"

#include "latentlab/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace latentlab {

std::vector<std::vector<std::uint32_t>> SimpleGraph::adjacency_lists() const {
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (const auto& [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
  return adj;
}

void SimpleGraph::write_edge_list(std::ostream& out) const {
  for (const auto& [u, v] : edges) out << u << ' ' << v << '\n';
}

SimpleGraph nn_graph(const std::vector<RatingSample>& samples, std::uint32_t tau) {
  if (tau < 1) throw std::domain_error("nn_graph: tau must be >= 1");
  SimpleGraph g;
  g.n = static_cast<std::uint32_t>(samples.size());
  const std::uint64_t n = samples.size();
  for (const auto& [key, count] : pairwise_overlaps(samples))
    if (count >= tau)
      g.edges.emplace_back(static_cast<std::uint32_t>(key / n), static_cast<std::uint32_t>(key % n));
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

BlockParams block_params(double T, double m, std::uint32_t tau, double p, std::uint32_t k,
                         std::uint32_t n) {
  if (T * T >= m) throw std::domain_error("block_params: regime requires T^2 < m");
  if (p <= 0.0 || p >= 1.0) throw std::domain_error("block_params: p must lie in (0,1)");
  if (tau < 1) throw std::domain_error("block_params: tau must be >= 1");
  const double base = std::pow(T * T / m, static_cast<double>(tau));
  BlockParams out;
  out.a = static_cast<double>(tau) * base;
  out.b = 0.5 * std::pow(p / 2.0, static_cast<double>(tau)) * base;
  out.phi = (out.a + static_cast<double>(k - 1) * out.b) / static_cast<double>(k);
  out.k = k;
  out.n = n;
  return out;
}

ContiguityCheck contiguity_condition(const BlockParams& params) {
  if (params.k < 2) throw std::domain_error("contiguity_condition: need k >= 2");
  ContiguityCheck c;
  c.lhs = static_cast<double>(params.n) * (params.a - params.b) * (params.a - params.b);
  c.rhs = (params.a + static_cast<double>(params.k - 1) * params.b) *
          std::log(static_cast<double>(params.k));
  c.holds = c.lhs <= c.rhs;
  return c;
}

SimpleGraph sbm_sample(std::uint32_t n, std::uint32_t k, double q_in, double q_out, RngStream& rng) {
  if (q_in < 0 || q_in > 1 || q_out < 0 || q_out > 1)
    throw std::domain_error("sbm_sample: probabilities must lie in [0,1]");
  SimpleGraph g;
  g.n = n;
  g.communities.resize(n);
  for (std::uint32_t i = 0; i < n; ++i)
    g.communities[i] = static_cast<std::uint32_t>(rng.uniform_below(k));
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v = u + 1; v < n; ++v) {
      const double q = g.communities[u] == g.communities[v] ? q_in : q_out;
      if (rng.uniform01() < q) g.edges.emplace_back(u, v);
    }
  return g;
}

SimpleGraph er_sample(std::uint32_t n, double phi, RngStream& rng) {
  if (phi < 0 || phi > 1) throw std::domain_error("er_sample: phi must lie in [0,1]");
  SimpleGraph g;
  g.n = n;
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v = u + 1; v < n; ++v)
      if (rng.uniform01() < phi) g.edges.emplace_back(u, v);
  return g;
}

GsbmBoundsReport verify_gsbm_bounds(const GenreStructure& structure,
                                    const std::vector<RatingSample>& samples,
                                    const std::vector<std::uint32_t>& genre_of_user,
                                    std::uint32_t tau, const BlockParams& params) {
  if (samples.size() != genre_of_user.size())
    throw std::invalid_argument("verify_gsbm_bounds: genre list size mismatch");
  if (structure.variant != StructureVariant::SharedCore)
    throw std::domain_error("verify_gsbm_bounds: shared-core structures only");
  const double m = structure.genre_size();
  const double p = structure.core_fraction;
  // the core is common to every genre; membership in genre 0 minus uniques
  std::vector<std::uint32_t> core = structure.genres[0];
  for (std::size_t gi = 1; gi < structure.genres.size(); ++gi) {
    std::vector<std::uint32_t> next;
    std::set_intersection(core.begin(), core.end(), structure.genres[gi].begin(),
                          structure.genres[gi].end(), std::back_inserter(next));
    core.swap(next);
  }

  std::vector<std::uint32_t> conforming;
  double T = 0;
  for (std::uint32_t u = 0; u < samples.size(); ++u)
    T = std::max(T, static_cast<double>(samples[u].size()));
  const double center = p * T;
  const double halfwidth = std::sqrt(p * T) * std::log(m);
  for (std::uint32_t u = 0; u < samples.size(); ++u) {
    std::size_t in_core = 0;
    for (std::uint32_t id : samples[u].movie_ids)
      if (std::binary_search(core.begin(), core.end(), id)) ++in_core;
    if (std::abs(static_cast<double>(in_core) - center) <= halfwidth) conforming.push_back(u);
  }

  const std::uint32_t k = structure.num_genres();
  // edge frequencies per genre cell among conforming users
  std::vector<std::vector<std::uint64_t>> pairs(k, std::vector<std::uint64_t>(k, 0));
  std::vector<std::vector<std::uint64_t>> hits(k, std::vector<std::uint64_t>(k, 0));
  std::uint64_t total_pairs = 0;
  std::vector<RatingSample> conf_samples;
  conf_samples.reserve(conforming.size());
  for (std::uint32_t u : conforming) conf_samples.push_back(samples[u]);
  const std::uint64_t cn = conf_samples.size();
  for (std::uint64_t i = 0; i < cn; ++i)
    for (std::uint64_t j = i + 1; j < cn; ++j) {
      std::uint32_t g1 = genre_of_user[conforming[i]], g2 = genre_of_user[conforming[j]];
      if (g1 > g2) std::swap(g1, g2);
      ++pairs[g1][g2];
      ++total_pairs;
    }
  if (total_pairs < 100)
    throw std::runtime_error("verify_gsbm_bounds: fewer than 100 conforming pairs");
  for (const auto& [key, count] : pairwise_overlaps(conf_samples)) {
    if (count < tau) continue;
    std::uint32_t g1 = genre_of_user[conforming[key / cn]];
    std::uint32_t g2 = genre_of_user[conforming[key % cn]];
    if (g1 > g2) std::swap(g1, g2);
    ++hits[g1][g2];
  }

  GsbmBoundsReport rep;
  rep.a = params.a;
  rep.b = params.b;
  rep.conforming_users = cn;
  rep.conforming_pairs = total_pairs;
  rep.max_in_prob = 0.0;
  rep.min_out_prob = 1.0;
  std::uint64_t n_in_cell = 0, n_out_cell = 0;
  for (std::uint32_t g1 = 0; g1 < k; ++g1)
    for (std::uint32_t g2 = g1; g2 < k; ++g2) {
      if (pairs[g1][g2] == 0) continue;
      const double freq = static_cast<double>(hits[g1][g2]) / static_cast<double>(pairs[g1][g2]);
      if (g1 == g2) {
        if (freq >= rep.max_in_prob) { rep.max_in_prob = freq; n_in_cell = pairs[g1][g2]; }
      } else {
        if (freq <= rep.min_out_prob) { rep.min_out_prob = freq; n_out_cell = pairs[g1][g2]; }
      }
    }
  rep.sigma_in = n_in_cell > 0 ? std::sqrt(rep.a * (1 - rep.a) / static_cast<double>(n_in_cell)) : 0.0;
  rep.sigma_out = n_out_cell > 0 ? std::sqrt(rep.b * (1 - rep.b) / static_cast<double>(n_out_cell)) : 0.0;
  rep.conforms = rep.max_in_prob <= rep.a + 3.0 * rep.sigma_in &&
                 rep.min_out_prob >= rep.b - 3.0 * rep.sigma_out;
  return rep;
}

double degree_variance(const SimpleGraph& g) {
  if (g.n == 0) return 0.0;
  std::vector<double> degree(g.n, 0.0);
  for (const auto& [u, v] : g.edges) {
    degree[u] += 1.0;
    degree[v] += 1.0;
  }
  const double mean = std::accumulate(degree.begin(), degree.end(), 0.0) / g.n;
  double var = 0.0;
  for (double d : degree) var += (d - mean) * (d - mean);
  return var / g.n;
}

double triangle_count(const SimpleGraph& g) {
  const auto adj = g.adjacency_lists();
  std::uint64_t triple = 0;
  for (const auto& [u, v] : g.edges) {
    const auto& a = adj[u];
    const auto& b = adj[v];
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
      if (a[i] < b[j]) ++i;
      else if (a[i] > b[j]) ++j;
      else { ++triple; ++i; ++j; }
    }
  }
  return static_cast<double>(triple) / 3.0;
}

double top_centered_eigenvalue(const SimpleGraph& g) {
  const std::uint32_t n = g.n;
  if (n == 0 || g.edges.empty()) return 0.0;
  const double phi_hat = 2.0 * static_cast<double>(g.edges.size()) /
                         (static_cast<double>(n) * static_cast<double>(n - 1));
  Vec x(n);
  for (std::uint32_t i = 0; i < n; ++i) x[i] = 1.0 + static_cast<double>(i) / n;
  x /= x.norm();
  // matvec of A - phi_hat (J - I) using the edge list and a rank-one update
  auto apply = [&](const Vec& v) {
    Vec y = Vec::Zero(n);
    for (const auto& [a, b] : g.edges) {
      y[a] += v[b];
      y[b] += v[a];
    }
    const double s = v.sum();
    y.array() -= phi_hat * s;
    y += phi_hat * v;
    return y;
  };
  double lambda = 0.0;
  for (int iter = 0; iter < 20000; ++iter) {
    Vec y = apply(x);
    const double norm = y.norm();
    if (norm < 1e-300) return 0.0;
    y /= norm;
    const double next = y.dot(apply(y));
    if (std::abs(next - lambda) <= 1e-8 * std::max(1.0, std::abs(next))) return std::abs(next);
    lambda = next;
    x.swap(y);
  }
  return std::abs(lambda);
}

double auc_of_scores(const std::vector<double>& scores_a, const std::vector<double>& scores_b) {
  struct Item { double score; int cls; };
  std::vector<Item> items;
  items.reserve(scores_a.size() + scores_b.size());
  for (double s : scores_a) items.push_back({s, 1});
  for (double s : scores_b) items.push_back({s, 0});
  std::sort(items.begin(), items.end(), [](const Item& x, const Item& y) { return x.score < y.score; });
  // midranks over ties
  double rank_sum_a = 0.0;
  std::size_t i = 0;
  while (i < items.size()) {
    std::size_t j = i;
    while (j < items.size() && items[j].score == items[i].score) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // average of ranks i+1..j
    for (std::size_t t = i; t < j; ++t)
      if (items[t].cls == 1) rank_sum_a += midrank;
    i = j;
  }
  const double na = static_cast<double>(scores_a.size());
  const double nb = static_cast<double>(scores_b.size());
  return (rank_sum_a - na * (na + 1) / 2.0) / (na * nb);
}

DistinguishReport distinguish(const GraphGenerator& model_a, const GraphGenerator& model_b,
                              int n_graphs, std::uint64_t master_seed, int threads) {
  if (n_graphs < 50) throw std::domain_error("distinguish: need at least 50 graphs per class");
  const std::vector<std::string> names = {"degree_variance", "triangle_count", "top_eigenvalue"};
  std::vector<std::vector<double>> stats_a(3, std::vector<double>(n_graphs));
  std::vector<std::vector<double>> stats_b(3, std::vector<double>(n_graphs));
  parallel_for(static_cast<std::size_t>(n_graphs), threads, [&](std::size_t i) {
    RngStream ra = derive_stream(master_seed, 2 * i);
    RngStream rb = derive_stream(master_seed, 2 * i + 1);
    const SimpleGraph ga = model_a(ra);
    const SimpleGraph gb = model_b(rb);
    stats_a[0][i] = degree_variance(ga);
    stats_b[0][i] = degree_variance(gb);
    stats_a[1][i] = triangle_count(ga);
    stats_b[1][i] = triangle_count(gb);
    stats_a[2][i] = top_centered_eigenvalue(ga);
    stats_b[2][i] = top_centered_eigenvalue(gb);
  });
  DistinguishReport rep;
  for (std::size_t s = 0; s < names.size(); ++s) {
    const double auc = auc_of_scores(stats_a[s], stats_b[s]);
    rep.auc[names[s]] = auc;
    rep.combined = std::max(rep.combined, std::max(auc, 1.0 - auc));
  }
  rep.stat_names = names;
  rep.stats_a = std::move(stats_a);
  rep.stats_b = std::move(stats_b);
  return rep;
}

}  // namespace latentlab
