#pragma once

#include "latentlab/core.hpp"

namespace latentlab {

struct InfnormSolution {
  Vec coefficients;  ///< b with A^T b = target
  double objective;  ///< ||b||_inf attained
  int cuts = 0;      ///< sign-pattern constraints generated on the way
};

/// Solves min ||b||_inf subject to A^T b = target for A of full column rank.
///
/// Works on the k-variable dual max <target, y> s.t. ||A y||_1 <= 1 by cutting
/// planes: each round adds the most violated sign-pattern constraint
/// sigma^T A y <= 1 and re-optimizes with a dual-simplex warm start. The primal
/// b is recovered from the optimal multipliers (b = sum mu_sigma sigma), then
/// projected back onto the equality constraints to scrub accumulated roundoff.
///
/// Throws on rank-deficient A (naming a dependent column) and when the cut
/// budget is exhausted before the dual iterate becomes feasible.
InfnormSolution minimize_infnorm(const Mat& A, const Vec& target, double tol = 1e-9,
                                 int max_cuts = 2000);

}  // namespace latentlab
