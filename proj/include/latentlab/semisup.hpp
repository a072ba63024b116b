#pragma once

#include "latentlab/core.hpp"
#include "latentlab/mixture.hpp"
#include "latentlab/rng.hpp"

#include <functional>
#include <stdexcept>
#include <vector>

namespace latentlab {

struct LinearClassifier {
  Vec w;
  double radius = 0.0;  ///< rho: ||w||_2 <= radius
};

/// sgn(<w, x>) with sgn(0) := +1.
int predict_sign(const LinearClassifier& clf, const Vec& features);

double average_hinge_loss(const Vec& w, const std::vector<Vec>& features,
                          const std::vector<int>& labels);

struct HingeFit {
  LinearClassifier classifier;
  double objective = 0.0;  ///< average hinge loss at the returned w
  int iterations = 0;
  int restarts = 0;
};

struct HingeConvergenceError : std::runtime_error {
  HingeFit best;
  explicit HingeConvergenceError(HingeFit fit)
      : std::runtime_error("hinge_minimize: iteration budget exhausted while still improving"),
        best(std::move(fit)) {}
};

/// Norm-constrained hinge minimization by projected subgradient descent with
/// restarts (first start at 0, the rest random in the rho-ball). Returns the
/// best iterate found; throws HingeConvergenceError if the budget runs out
/// while the objective is still improving by more than tol per window.
HingeFit hinge_minimize(const std::vector<Vec>& features, const std::vector<int>& labels, double rho,
                        double tol = 1e-6, int iteration_budget = 200000,
                        std::uint64_t restart_seed = 0, int restarts = 5);

struct BoundTerms {
  double c_t = 0.0;
  double r_t = 0.0;
  double e_t = 0.0;
  double beta = 0.0, gamma = 0.0, rho = 0.0, b_cap = 0.0, delta = 0.0;
  int t = 0;
  double total() const { return c_t + r_t + e_t; }
};

/// Generalization-bound terms:
///   C_t = (1-beta)(1 + sqrt(ln(1/delta)/((1-beta) t))) rho B
///       + beta (1 - sqrt(ln(1/delta)/(beta t))) rho gamma,
///   R_t = sqrt(rho^2 / t),  E_t = sqrt(ln(1/delta) / t).
/// beta = 1 zeroes the first summand by continuity.
BoundTerms bound_terms(double beta, double gamma, double rho, double b_cap, int t, double delta);

/// Draws one user: the observable sample plus its simulation-side latent.
using UserGenerator = std::function<std::pair<RatingSample, BinaryLatent>(RngStream&)>;
/// Maps a sample to a latent estimate. The true latent is supplied so test
/// doubles (latent passthrough) can be plugged in; real encoders ignore it.
using LatentEncoder = std::function<Vec(const RatingSample&, const BinaryLatent&)>;

struct SemisupPoint {
  int t = 0;
  double test_error = 0.0;
  BoundTerms bound;
  double realized_beta = 0.0;
  double realized_gamma = 0.0;
  double b_cap = 0.0;    ///< max feature norm seen on the train set
  double margin = 0.0;   ///< realized margin of the trained classifier
};

struct SemisupConfig {
  Vec w_true;
  std::vector<int> t_values;
  int n_test = 1000;
  double rho = 1.0;
  double delta = 0.05;
  double tol = 1e-6;
  int iteration_budget = 200000;
};

/// Labeled-sample-efficiency experiment: for each t trains a norm-constrained
/// hinge classifier on encoded features 2 f(x) - 1 against hyperplane labels,
/// and evaluates the matching generalization bound at the realized encoder
/// quality. The test set is shared across the t grid.
std::vector<SemisupPoint> semisup_experiment(const UserGenerator& generator,
                                             const LatentEncoder& encoder,
                                             const SemisupConfig& config, std::uint64_t master_seed,
                                             int threads = 1);

}  // namespace latentlab
