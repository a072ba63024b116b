#pragma once

#include "latentlab/core.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <utility>
#include <vector>

namespace latentlab::oracle {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

BigInt binomial(std::uint64_t n, std::uint64_t k);
double binomial_double(std::uint64_t n, std::uint64_t k);

/// Closed form for the set-mode overlap pmf of two users drawing T-subsets of
/// the same m movies: C(m-T, T-tau) * C(T, tau) / C(m, T).
BigRational overlap_pmf_same_rational(std::uint32_t m, std::uint32_t T, std::uint32_t tau);
double exact_overlap_pmf_same(std::uint32_t m, std::uint32_t T, std::uint32_t tau);

/// Exhaustive check of the closed form: enumerates all C(m,T)^2 subset pairs.
/// Affordable for m <= 12 or so.
BigRational enumerate_overlap_pmf_same(std::uint32_t m, std::uint32_t T, std::uint32_t tau);

struct IndepOverlapPmf {
  double formula;       ///< printed closed form
  double enumeration;   ///< exact value by enumerating all m^(2T) emission pairs
  double difference;    ///< formula - enumeration
};

/// Overlap pmf (distinct-movie overlap) for two users emitting T i.i.d. uniform
/// draws from one genre of m movies. The printed formula is an approximation;
/// the enumeration is exact and requires m^T <= enumeration_budget.
IndepOverlapPmf exact_overlap_pmf_indep(std::uint32_t m, std::uint32_t T, std::uint32_t tau,
                                        std::uint64_t enumeration_budget = 1000000);

/// One latent hypothesis with its exact posterior probability.
struct PosteriorEntry {
  BinaryLatent latent;
  double probability;
};

/// Exact posterior over all C(k,s) binary latents for a set-mode sample:
/// Pr[x|h] = 1/C(|union(h)|, T) when x is inside the union, else 0.
std::vector<PosteriorEntry> exact_posterior(const GenreStructure& structure, std::uint32_t s,
                                            const RatingSample& x, std::uint64_t max_latents = 10000);

struct LogLinearExpectations {
  double z;                   ///< partition function
  double tilted_mean_signal;  ///< E_{p(.|h)} <W_x, h>
  Vec offaxis_means;          ///< E_{p(.|h)} <W_x, u_j> for an orthonormal completion of h
};

/// Exact conditional expectations under the softmax emission law, by direct
/// summation over all M movies.
LogLinearExpectations exact_loglinear_expectations(const Mat& W, const Vec& h);

/// Exhaustive LP optimum of min ||b||_inf subject to A^T b = e_col, obtained by
/// vertex enumeration of the dual polytope {y : ||A y||_1 <= 1}. Intended for
/// M <= 6, k <= 3 only (2^M sign patterns, all k-subsets).
double exhaustive_min_infnorm(const Mat& A, std::uint32_t col);

/// Orthonormal completion used by the log-linear diagnostics: returns a d x d
/// orthogonal matrix whose first column is the unit vector h.
Mat householder_basis(const Vec& h);

}  // namespace latentlab::oracle
