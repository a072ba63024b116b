#include "latentlab/lp.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace latentlab {

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kCostTol = 1e-10;
constexpr double kFeasTol = 1e-10;

// Full-tableau simplex over max c^T y, rows g^T y <= rhs, y free (split u - v).
// Rows can be appended after optimization; dual simplex restores optimality.
class GrowingTableau {
 public:
  GrowingTableau(const Vec& objective)
      : k_(static_cast<int>(objective.size())), rows_(0) {
    cap_rows_ = 64;
    resize_storage();  // zero-fills cost_ at full capacity
    for (int i = 0; i < k_; ++i) {
      cost_[i] = objective[i];
      cost_[k_ + i] = -objective[i];
    }
  }

  int add_row(const Vec& g, double rhs) {
    if (rows_ == cap_rows_) {
      cap_rows_ *= 2;
      resize_storage();
    }
    const int r = rows_++;
    Vec raw = Vec::Zero(num_cols());
    for (int i = 0; i < k_; ++i) {
      raw[i] = g[i];
      raw[k_ + i] = -g[i];
    }
    raw[slack_col(r)] = 1.0;
    double raw_rhs = rhs;
    // express the new row in the current basis
    for (int rr = 0; rr < r; ++rr) {
      const double coeff = raw[basis_[rr]];
      if (coeff != 0.0) {
        raw.head(num_cols()) -= coeff * body_.row(rr).head(num_cols()).transpose();
        raw_rhs -= coeff * rhs_[rr];
      }
    }
    body_.row(r).head(num_cols()) = raw.transpose();
    rhs_[r] = raw_rhs;
    basis_.push_back(slack_col(r));
    return r;
  }

  void primal_simplex(int max_iters = 100000) {
    for (int iter = 0; iter < max_iters; ++iter) {
      const bool bland = iter > 2000;
      int enter = -1;
      double best = kCostTol;
      for (int j = 0; j < num_cols(); ++j) {
        if (cost_[j] > best) {
          enter = j;
          if (bland) break;
          best = cost_[j];
        }
      }
      if (enter < 0) return;  // optimal
      int leave = -1;
      double best_ratio = 0.0;
      for (int r = 0; r < rows_; ++r) {
        const double a = body_(r, enter);
        if (a > kPivotTol) {
          const double ratio = rhs_[r] / a;
          if (leave < 0 || ratio < best_ratio - 1e-12 ||
              (ratio < best_ratio + 1e-12 && basis_[r] < basis_[leave])) {
            leave = r;
            best_ratio = ratio;
          }
        }
      }
      if (leave < 0) throw std::runtime_error("simplex: unbounded objective");
      pivot(leave, enter);
    }
    throw std::runtime_error("simplex: primal iteration budget exhausted");
  }

  void dual_simplex(int max_iters = 100000) {
    for (int iter = 0; iter < max_iters; ++iter) {
      int leave = -1;
      double most_negative = -kFeasTol;
      for (int r = 0; r < rows_; ++r) {
        if (rhs_[r] < most_negative) {
          most_negative = rhs_[r];
          leave = r;
        }
      }
      if (leave < 0) return;  // primal feasible again
      int enter = -1;
      double best_ratio = 0.0;
      for (int j = 0; j < num_cols(); ++j) {
        const double a = body_(leave, j);
        if (a < -kPivotTol) {
          const double ratio = cost_[j] / a;  // >= 0 since cost <= 0
          if (enter < 0 || ratio < best_ratio - 1e-12) {
            enter = j;
            best_ratio = ratio;
          }
        }
      }
      if (enter < 0) throw std::runtime_error("simplex: dual step found no pivot (infeasible row)");
      pivot(leave, enter);
    }
    throw std::runtime_error("simplex: dual iteration budget exhausted");
  }

  Vec solution() const {
    Vec y = Vec::Zero(k_);
    for (int r = 0; r < rows_; ++r) {
      const int var = basis_[r];
      if (var < k_) y[var] += rhs_[r];
      else if (var < 2 * k_) y[var - k_] -= rhs_[r];
    }
    return y;
  }

  /// Multiplier of row r's constraint (valid at an optimal tableau).
  double row_dual(int r) const { return -cost_[slack_col(r)]; }

 private:
  int num_cols() const { return 2 * k_ + rows_; }
  int slack_col(int r) const { return 2 * k_ + r; }

  void resize_storage() {
    const int cols = 2 * k_ + cap_rows_;
    Mat body = Mat::Zero(cap_rows_, cols);
    if (rows_ > 0) body.topLeftCorner(rows_, body_.cols()) = body_.topRows(rows_);
    body_.swap(body);
    Vec rhs = Vec::Zero(cap_rows_);
    if (rows_ > 0) rhs.head(rows_) = rhs_.head(rows_);
    rhs_.swap(rhs);
    Vec cost = Vec::Zero(cols);
    if (cost_.size() > 0) cost.head(cost_.size()) = cost_;
    cost_.swap(cost);
  }

  void pivot(int r, int enter) {
    const double p = body_(r, enter);
    body_.row(r).head(num_cols()) /= p;
    rhs_[r] /= p;
    for (int rr = 0; rr < rows_; ++rr) {
      if (rr == r) continue;
      const double f = body_(rr, enter);
      if (f != 0.0) {
        body_.row(rr).head(num_cols()) -= f * body_.row(r).head(num_cols());
        rhs_[rr] -= f * rhs_[r];
        body_(rr, enter) = 0.0;
      }
    }
    const double fc = cost_[enter];
    if (fc != 0.0) {
      cost_.head(num_cols()) -= fc * body_.row(r).head(num_cols()).transpose();
      cost_[enter] = 0.0;
    }
    basis_[r] = enter;
  }

  int k_;
  int rows_;
  int cap_rows_;
  Mat body_;
  Vec rhs_;
  Vec cost_;
  std::vector<int> basis_;
};

std::uint64_t sign_hash(const std::vector<std::int8_t>& sigma) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (std::int8_t s : sigma) {
    h ^= static_cast<std::uint8_t>(s);
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace

InfnormSolution minimize_infnorm(const Mat& A, const Vec& target, double tol, int max_cuts) {
  const int M = static_cast<int>(A.rows());
  const int k = static_cast<int>(A.cols());
  if (target.size() != k) throw std::invalid_argument("minimize_infnorm: target dimension mismatch");
  if (M < k) throw std::invalid_argument("minimize_infnorm: need M >= k");

  Eigen::BDCSVD<Mat> svd(A);
  const Vec& sing = svd.singularValues();
  const double rank_tol = std::max(M, k) * std::numeric_limits<double>::epsilon() * sing[0];
  if (sing[k - 1] <= rank_tol) {
    Eigen::ColPivHouseholderQR<Mat> qr(A);
    qr.setThreshold(1e-10);
    const auto perm = qr.colsPermutation().indices();
    const int deficient = perm[std::max(0, static_cast<int>(qr.rank()))];
    throw std::runtime_error("minimize_infnorm: A is rank-deficient; column " +
                             std::to_string(deficient) + " lies in the span of the others");
  }
  const double beta = 2.0 / sing[k - 1];

  GrowingTableau tab(target);
  for (int i = 0; i < k; ++i) {
    Vec e = Vec::Zero(k);
    e[i] = 1.0;
    tab.add_row(e, beta);
    tab.add_row(-e, beta);
  }
  tab.primal_simplex();

  std::vector<std::vector<std::int8_t>> cut_signs;
  std::vector<int> cut_rows;
  std::unordered_set<std::uint64_t> seen;
  Vec y;
  double best_violation = std::numeric_limits<double>::infinity();
  bool converged = false;
  while (static_cast<int>(cut_signs.size()) < max_cuts) {
    y = tab.solution();
    const Vec r = A * y;
    const double violation = r.lpNorm<1>() - 1.0;
    best_violation = std::min(best_violation, violation);
    if (violation <= 1e-9) {
      converged = true;
      break;
    }
    std::vector<std::int8_t> sigma(M);
    for (int i = 0; i < M; ++i) sigma[i] = r[i] < 0.0 ? -1 : 1;
    if (!seen.insert(sign_hash(sigma)).second) {
      // the maximally violated pattern is already enforced: we are at the
      // solver's floating-point floor, accept the iterate
      converged = true;
      break;
    }
    Vec g = Vec::Zero(k);
    for (int i = 0; i < M; ++i) g += static_cast<double>(sigma[i]) * A.row(i).transpose();
    cut_rows.push_back(tab.add_row(g, 1.0));
    cut_signs.push_back(std::move(sigma));
    tab.dual_simplex();
  }
  if (!converged)
    throw std::runtime_error("minimize_infnorm: cut budget exhausted, best dual violation " +
                             std::to_string(best_violation));

  Vec b = Vec::Zero(M);
  for (std::size_t c = 0; c < cut_signs.size(); ++c) {
    const double mu = tab.row_dual(cut_rows[c]);
    if (mu > 0.0)
      for (int i = 0; i < M; ++i) b[i] += mu * static_cast<double>(cut_signs[c][i]);
  }

  // scrub simplex roundoff: project the residual back through the equalities
  const Vec residual = target - A.transpose() * b;
  if (residual.lpNorm<Eigen::Infinity>() > 1e-15)
    b += A * (A.transpose() * A).ldlt().solve(residual);
  const double final_residual = (target - A.transpose() * b).lpNorm<Eigen::Infinity>();
  if (final_residual > tol)
    throw std::runtime_error("minimize_infnorm: equality residual " + std::to_string(final_residual) +
                             " exceeds tolerance");
  return {b, b.lpNorm<Eigen::Infinity>(), static_cast<int>(cut_signs.size())};
}

}  // namespace latentlab
