#include "latentlab/baselines.hpp"

#include "latentlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace latentlab {

std::uint32_t overlap(const RatingSample& a, const RatingSample& b) {
  // both id lists are sorted; walk them together counting min-multiplicities
  std::uint32_t count = 0;
  std::size_t i = 0, j = 0;
  while (i < a.movie_ids.size() && j < b.movie_ids.size()) {
    const std::uint32_t va = a.movie_ids[i], vb = b.movie_ids[j];
    if (va < vb) ++i;
    else if (va > vb) ++j;
    else {
      std::uint32_t ca = 0, cb = 0;
      while (i < a.movie_ids.size() && a.movie_ids[i] == va) { ++ca; ++i; }
      while (j < b.movie_ids.size() && b.movie_ids[j] == va) { ++cb; ++j; }
      count += std::min(ca, cb);
    }
  }
  return count;
}

std::unordered_map<std::uint64_t, std::uint32_t> pairwise_overlaps(const std::vector<RatingSample>& users) {
  const std::uint64_t n = users.size();
  // occurrences[movie] -> list of (user, count)
  std::unordered_map<std::uint32_t, std::vector<std::pair<std::uint32_t, std::uint32_t>>> occurrences;
  for (std::uint32_t u = 0; u < n; ++u) {
    const auto& ids = users[u].movie_ids;
    std::size_t i = 0;
    while (i < ids.size()) {
      const std::uint32_t id = ids[i];
      std::uint32_t c = 0;
      while (i < ids.size() && ids[i] == id) { ++c; ++i; }
      occurrences[id].emplace_back(u, c);
    }
  }
  std::unordered_map<std::uint64_t, std::uint32_t> pair_counts;
  for (const auto& [movie, holders] : occurrences) {
    for (std::size_t i = 0; i < holders.size(); ++i)
      for (std::size_t j = i + 1; j < holders.size(); ++j) {
        const auto [u1, c1] = holders[i];
        const auto [u2, c2] = holders[j];
        const std::uint64_t key = u1 < u2 ? u1 * n + u2 : u2 * n + u1;
        pair_counts[key] += std::min(c1, c2);
      }
  }
  return pair_counts;
}

std::uint32_t max_pairwise_overlap(const std::vector<RatingSample>& users) {
  std::uint32_t best = 0;
  for (const auto& [key, count] : pairwise_overlaps(users)) best = std::max(best, count);
  return best;
}

OverlapHistogram overlap_histogram(const std::vector<UserRecord>& users, std::uint64_t pair_budget,
                                   RngStream& rng) {
  const std::uint64_t n = users.size();
  if (n < 2) throw std::domain_error("overlap_histogram: need at least two users");
  std::uint32_t T = 0, k = 0;
  std::vector<std::uint32_t> genre(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    if (!users[i].latent || users[i].latent->sparsity() != 1)
      throw std::domain_error("overlap_histogram: users must carry s=1 latents");
    genre[i] = users[i].latent->genre_ids[0];
    k = users[i].latent->num_genres;
    T = std::max(T, users[i].sample.size());
  }
  std::vector<std::uint64_t> same_counts(T + 1, 0), diff_counts(T + 1, 0);
  std::uint64_t same_pairs = 0, diff_pairs = 0;
  const std::uint64_t all_pairs = n * (n - 1) / 2;
  if (all_pairs <= pair_budget) {
    // full scan: the inverted index yields the nonzero overlaps, the zero
    // bucket is recovered from the pair totals
    std::vector<RatingSample> samples(n);
    for (std::uint64_t i = 0; i < n; ++i) samples[i] = users[i].sample;
    std::uint64_t same_nonzero = 0, diff_nonzero = 0;
    for (const auto& [key, count] : pairwise_overlaps(samples)) {
      const std::uint64_t u = key / n, v = key % n;
      const std::uint32_t o = std::min(count, T);
      if (genre[u] == genre[v]) { ++same_nonzero; ++same_counts[o]; }
      else { ++diff_nonzero; ++diff_counts[o]; }
    }
    for (std::uint64_t u = 0; u < n; ++u)
      for (std::uint64_t v = u + 1; v < n; ++v)
        (genre[u] == genre[v] ? same_pairs : diff_pairs) += 1;
    same_counts[0] += same_pairs - same_nonzero;
    diff_counts[0] += diff_pairs - diff_nonzero;
  } else {
    for (std::uint64_t trial = 0; trial < pair_budget; ++trial) {
      const std::uint64_t u = rng.uniform_below(n);
      std::uint64_t v = rng.uniform_below(n - 1);
      if (v >= u) ++v;
      const std::uint32_t o = std::min(overlap(users[u].sample, users[v].sample), T);
      if (genre[u] == genre[v]) { ++same_pairs; ++same_counts[o]; }
      else { ++diff_pairs; ++diff_counts[o]; }
    }
  }
  if (same_pairs == 0 || diff_pairs == 0)
    throw std::runtime_error("overlap_histogram: a pair class is empty, enlarge the pool");

  OverlapHistogram h;
  h.same_pairs = same_pairs;
  h.diff_pairs = diff_pairs;
  h.pmf_same.resize(T + 1);
  h.pmf_diff.resize(T + 1);
  for (std::uint32_t t = 0; t <= T; ++t) {
    h.pmf_same[t] = static_cast<double>(same_counts[t]) / static_cast<double>(same_pairs);
    h.pmf_diff[t] = static_cast<double>(diff_counts[t]) / static_cast<double>(diff_pairs);
  }
  h.ratio.resize(T + 1);
  double tail_same = 0.0, tail_diff = 0.0;
  for (std::int64_t t = T; t >= 0; --t) {
    tail_same += h.pmf_same[static_cast<std::size_t>(t)];
    tail_diff += h.pmf_diff[static_cast<std::size_t>(t)];
    h.ratio[static_cast<std::size_t>(t)] =
        tail_same > 0.0 ? static_cast<double>(k - 1) * tail_diff / tail_same
                        : std::numeric_limits<double>::infinity();
  }
  return h;
}

namespace {

std::vector<std::uint32_t> neighbor_indices(const std::vector<UserRecord>& train,
                                            const RatingSample& query, std::uint32_t tau) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < train.size(); ++i)
    if (overlap(train[i].sample, query) >= tau) out.push_back(i);
  return out;
}

int majority_label(const std::vector<int>& labels) {
  int pos = 0, neg = 0;
  for (int l : labels) (l > 0 ? pos : neg) += 1;
  if (pos == neg) return -1;  // ties break toward the numerically smaller label
  return pos > neg ? 1 : -1;
}

}  // namespace

int knn_predict_label(const std::vector<UserRecord>& train, const RatingSample& query,
                      std::uint32_t tau) {
  if (tau < 1) throw std::domain_error("knn_predict_label: tau must be >= 1");
  const auto neighbors = neighbor_indices(train, query, tau);
  if (neighbors.empty()) return kAbstain;
  std::vector<int> labels;
  labels.reserve(neighbors.size());
  for (std::uint32_t i : neighbors) {
    if (!train[i].label) throw std::domain_error("knn_predict_label: unlabeled train user");
    labels.push_back(*train[i].label);
  }
  return majority_label(labels);
}

int knn_predict_movie(const std::vector<UserRecord>& train, const RatingSample& query,
                      std::uint32_t tau, std::uint32_t movie_id) {
  if (tau < 1) throw std::domain_error("knn_predict_movie: tau must be >= 1");
  for (std::uint32_t i = 0; i < train.size(); ++i) {
    if (overlap(train[i].sample, query) < tau) continue;
    const auto& ids = train[i].sample.movie_ids;
    if (std::binary_search(ids.begin(), ids.end(), movie_id)) return 1;
  }
  return 0;
}

LargeTThresholds larget_thresholds(std::uint32_t s, double T, double m) {
  if (s < 1 || m < 1) throw std::domain_error("larget_thresholds: need s >= 1, m >= 1");
  const double sd = static_cast<double>(s);
  return {(1.0 / sd - 1.0 / (sd * sd)) * T * T / m, (1.0 / sd) * T * T / m};
}

void LookupTable::fit(const std::vector<BinaryLatent>& latents, const std::vector<int>& labels) {
  if (latents.size() != labels.size()) throw std::invalid_argument("LookupTable::fit: size mismatch");
  for (std::size_t i = 0; i < latents.size(); ++i) {
    if (latents[i].num_genres != k_ || latents[i].sparsity() != s_)
      throw std::domain_error("LookupTable::fit: latent shape mismatch");
    const auto [it, inserted] = table_.try_emplace(latents[i].genre_ids, labels[i]);
    if (!inserted && it->second != labels[i])
      throw std::runtime_error("LookupTable::fit: conflicting labels for one latent");
  }
}

std::optional<int> LookupTable::predict(const BinaryLatent& h) const {
  const auto it = table_.find(h.genre_ids);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

double LookupTable::coverage() const {
  return static_cast<double>(table_.size()) / oracle::binomial_double(k_, s_);
}

int supervised_baseline(const std::vector<UserRecord>& train, const RatingSample& query) {
  if (train.empty()) throw std::domain_error("supervised_baseline: empty train set");
  std::vector<int> sharing;
  std::vector<int> all;
  for (const auto& rec : train) {
    if (!rec.label) throw std::domain_error("supervised_baseline: unlabeled train user");
    all.push_back(*rec.label);
    if (overlap(rec.sample, query) >= 1) sharing.push_back(*rec.label);
  }
  return majority_label(sharing.empty() ? all : sharing);
}

}  // namespace latentlab
