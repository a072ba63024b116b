#include "latentlab/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>

namespace latentlab::oracle {

namespace {

// next bitmask with the same popcount (Gosper's hack)
std::uint64_t next_combination(std::uint64_t v) {
  const std::uint64_t t = v | (v - 1);
  return (t + 1) | (((~t & -(~t)) - 1) >> (std::countr_zero(v) + 1));
}

bool is_subset_sorted(const std::vector<std::uint32_t>& inner, const std::vector<std::uint32_t>& outer) {
  std::size_t j = 0;
  for (std::uint32_t id : inner) {
    while (j < outer.size() && outer[j] < id) ++j;
    if (j == outer.size() || outer[j] != id) return false;
    ++j;
  }
  return true;
}

}  // namespace

BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt result = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    result *= static_cast<std::uint64_t>(n - i);
    result /= static_cast<std::uint64_t>(i + 1);
  }
  return result;
}

double binomial_double(std::uint64_t n, std::uint64_t k) {
  return binomial(n, k).convert_to<double>();
}

BigRational overlap_pmf_same_rational(std::uint32_t m, std::uint32_t T, std::uint32_t tau) {
  if (tau > T || T > m) throw std::domain_error("overlap_pmf_same: need tau <= T <= m");
  return BigRational(binomial(m - T, T - tau) * binomial(T, tau), binomial(m, T));
}

double exact_overlap_pmf_same(std::uint32_t m, std::uint32_t T, std::uint32_t tau) {
  return overlap_pmf_same_rational(m, T, tau).convert_to<double>();
}

BigRational enumerate_overlap_pmf_same(std::uint32_t m, std::uint32_t T, std::uint32_t tau) {
  if (tau > T || T > m) throw std::domain_error("enumerate_overlap_pmf_same: need tau <= T <= m");
  if (m > 16) throw std::domain_error("enumerate_overlap_pmf_same: m too large for enumeration");
  if (T == 0) return tau == 0 ? BigRational(1) : BigRational(0);
  std::vector<std::uint64_t> subsets;
  const std::uint64_t limit = std::uint64_t{1} << m;
  for (std::uint64_t v = (std::uint64_t{1} << T) - 1; v < limit; v = next_combination(v))
    subsets.push_back(v);
  BigInt hits = 0;
  for (std::uint64_t a : subsets)
    for (std::uint64_t b : subsets)
      if (static_cast<std::uint32_t>(std::popcount(a & b)) == tau) ++hits;
  return BigRational(hits, BigInt(subsets.size()) * BigInt(subsets.size()));
}

IndepOverlapPmf exact_overlap_pmf_indep(std::uint32_t m, std::uint32_t T, std::uint32_t tau,
                                        std::uint64_t enumeration_budget) {
  if (tau > T || T > m) throw std::domain_error("exact_overlap_pmf_indep: need tau <= T <= m");
  if (m > 20) throw std::domain_error("exact_overlap_pmf_indep: m too large");
  const double formula = binomial_double(T, tau) * binomial_double(T, tau) *
                         std::pow(1.0 / m, tau) *
                         std::pow(1.0 - static_cast<double>(T - tau) / m, 2.0 * (T - tau));

  // enumerate all m^T emissions once, bucketed by the set of distinct movies
  double emissions = 1.0;
  for (std::uint32_t i = 0; i < T; ++i) {
    emissions *= m;
    if (emissions > static_cast<double>(enumeration_budget))
      throw std::domain_error("exact_overlap_pmf_indep: m^T exceeds enumeration budget");
  }
  std::map<std::uint32_t, BigInt> by_mask;
  std::vector<std::uint32_t> emission(T, 0);
  for (;;) {
    std::uint32_t mask = 0;
    for (std::uint32_t v : emission) mask |= (std::uint32_t{1} << v);
    by_mask[mask] += 1;
    std::uint32_t pos = 0;
    while (pos < T && emission[pos] + 1 == m) emission[pos++] = 0;
    if (pos == T) break;
    ++emission[pos];
  }
  BigInt hits = 0;
  BigInt total = 0;
  for (const auto& [ma, ca] : by_mask)
    for (const auto& [mb, cb] : by_mask) {
      total += ca * cb;
      if (static_cast<std::uint32_t>(std::popcount(ma & mb)) == tau) hits += ca * cb;
    }
  const double enumeration = BigRational(hits, total).convert_to<double>();
  return {formula, enumeration, formula - enumeration};
}

std::vector<PosteriorEntry> exact_posterior(const GenreStructure& structure, std::uint32_t s,
                                            const RatingSample& x, std::uint64_t max_latents) {
  if (x.mode != ReplacementMode::Set)
    throw std::domain_error("exact_posterior: set-mode samples only");
  const std::uint32_t k = structure.num_genres();
  if (s == 0 || s > k) throw std::domain_error("exact_posterior: need 1 <= s <= k");
  const BigInt space = binomial(k, s);
  if (space > max_latents) throw std::domain_error("exact_posterior: latent space too large");
  const std::uint32_t T = x.size();

  std::vector<PosteriorEntry> entries;
  std::vector<std::uint32_t> combo(s);
  for (std::uint32_t i = 0; i < s; ++i) combo[i] = i;
  std::vector<BigRational> weights;
  BigRational total = 0;
  for (;;) {
    const auto uni = structure.genre_union(combo);
    BigRational w = 0;
    if (uni.size() >= T && is_subset_sorted(x.movie_ids, uni))
      w = BigRational(1, binomial(uni.size(), T));
    weights.push_back(w);
    total += w;
    entries.push_back({BinaryLatent{k, combo}, 0.0});
    // next lexicographic s-combination of [k]
    int pos = static_cast<int>(s) - 1;
    while (pos >= 0 && combo[pos] == k - s + pos) --pos;
    if (pos < 0) break;
    ++combo[pos];
    for (std::uint32_t i = pos + 1; i < s; ++i) combo[i] = combo[i - 1] + 1;
  }
  if (total == 0) throw std::domain_error("exact_posterior: sample inconsistent with every latent");
  for (std::size_t i = 0; i < entries.size(); ++i)
    entries[i].probability = BigRational(weights[i] / total).convert_to<double>();
  return entries;
}

Mat householder_basis(const Vec& h) {
  const Eigen::Index d = h.size();
  Vec u = h;
  u[0] -= 1.0;
  const double norm = u.norm();
  if (norm < 1e-14) return Mat::Identity(d, d);
  u /= norm;
  return Mat::Identity(d, d) - 2.0 * u * u.transpose();
}

LogLinearExpectations exact_loglinear_expectations(const Mat& W, const Vec& h) {
  if (W.cols() != h.size()) throw std::invalid_argument("exact_loglinear_expectations: dimension mismatch");
  const Vec v = W * h;
  const double vmax = v.maxCoeff();
  const Vec expv = (v.array() - vmax).exp();
  const double denom = expv.sum();
  const double z = std::exp(vmax) * denom;
  const Vec p = expv / denom;
  const double tilted = p.dot(v);
  const Vec g = W.transpose() * p;
  const Mat q = householder_basis(h);
  const Vec coords = q.transpose() * g;
  return {z, tilted, coords.tail(h.size() - 1)};
}

double exhaustive_min_infnorm(const Mat& A, std::uint32_t col) {
  const std::uint32_t M = static_cast<std::uint32_t>(A.rows());
  const std::uint32_t k = static_cast<std::uint32_t>(A.cols());
  if (M > 8 || k > 3) throw std::domain_error("exhaustive_min_infnorm: instance too large for enumeration");
  if (col >= k) throw std::out_of_range("exhaustive_min_infnorm: column out of range");

  // facet candidates sigma^T A for every sign pattern sigma
  const std::uint32_t patterns = std::uint32_t{1} << M;
  Mat rows(patterns, k);
  for (std::uint32_t bits = 0; bits < patterns; ++bits) {
    Vec sigma(M);
    for (std::uint32_t i = 0; i < M; ++i) sigma[i] = (bits >> i) & 1 ? 1.0 : -1.0;
    rows.row(bits) = (A.transpose() * sigma).transpose();
  }

  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::uint32_t> pick(k);
  std::function<void(std::uint32_t, std::uint32_t)> recurse = [&](std::uint32_t start, std::uint32_t depth) {
    if (depth == k) {
      Mat G(k, k);
      for (std::uint32_t i = 0; i < k; ++i) G.row(i) = rows.row(pick[i]);
      Eigen::FullPivLU<Mat> lu(G);
      if (!lu.isInvertible()) return;
      const Vec y = lu.solve(Vec::Ones(k));
      if ((A * y).lpNorm<1>() <= 1.0 + 1e-9) best = std::max(best, y[col]);
      return;
    }
    for (std::uint32_t i = start; i < patterns; ++i) {
      pick[depth] = i;
      recurse(i + 1, depth + 1);
    }
  };
  recurse(0, 0);
  if (!std::isfinite(best) || best <= 0.0)
    throw std::runtime_error("exhaustive_min_infnorm: no feasible vertex (rank-deficient A?)");
  return best;
}

}  // namespace latentlab::oracle
