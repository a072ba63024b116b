#include "latentlab/semisup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace latentlab {

int predict_sign(const LinearClassifier& clf, const Vec& features) {
  return clf.w.dot(features) < 0.0 ? -1 : 1;
}

double average_hinge_loss(const Vec& w, const std::vector<Vec>& features,
                          const std::vector<int>& labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i)
    total += std::max(0.0, 1.0 - static_cast<double>(labels[i]) * w.dot(features[i]));
  return total / static_cast<double>(features.size());
}

HingeFit hinge_minimize(const std::vector<Vec>& features, const std::vector<int>& labels, double rho,
                        double tol, int iteration_budget, std::uint64_t restart_seed, int restarts) {
  if (features.empty() || features.size() != labels.size())
    throw std::invalid_argument("hinge_minimize: empty or mismatched data");
  if (rho <= 0.0) throw std::domain_error("hinge_minimize: rho must be positive");
  const Eigen::Index dim = features[0].size();
  const double n = static_cast<double>(features.size());
  double feat_scale = 1.0;
  for (const auto& f : features) feat_scale = std::max(feat_scale, f.norm());

  auto project = [&](Vec& w) {
    const double norm = w.norm();
    if (norm > rho) w *= rho / norm;
  };

  HingeFit best;
  best.objective = std::numeric_limits<double>::infinity();
  int iterations_used = 0;
  bool improving_at_budget = false;

  RngStream rng = derive_stream(restart_seed, 0x5e3150ull);
  const int per_restart = iteration_budget / std::max(1, restarts);
  for (int restart = 0; restart < restarts; ++restart) {
    Vec w = Vec::Zero(dim);
    if (restart > 0) {
      for (Eigen::Index i = 0; i < dim; ++i) w[i] = rng.normal();
      const double norm = w.norm();
      if (norm > 0) w *= rho * rng.uniform01() / norm;
    }
    double window_best = std::numeric_limits<double>::infinity();
    double prev_window_best = std::numeric_limits<double>::infinity();
    const int window = 250;
    for (int iter = 1; iter <= per_restart; ++iter) {
      ++iterations_used;
      const double objective = average_hinge_loss(w, features, labels);
      if (objective < best.objective) {
        best.objective = objective;
        best.classifier = {w, rho};
      }
      window_best = std::min(window_best, objective);
      if (objective == 0.0) break;
      Vec g = Vec::Zero(dim);
      for (std::size_t i = 0; i < features.size(); ++i) {
        const double l = static_cast<double>(labels[i]);
        if (1.0 - l * w.dot(features[i]) > 0.0) g -= (l / n) * features[i];
      }
      if (g.norm() == 0.0) break;
      const double step = (rho / feat_scale) / std::sqrt(static_cast<double>(iter));
      w -= step * g;
      project(w);
      if (iter % window == 0) {
        if (prev_window_best - window_best <= tol && std::isfinite(prev_window_best)) break;
        prev_window_best = window_best;
        window_best = std::numeric_limits<double>::infinity();
      }
      if (iter == per_restart)
        improving_at_budget = !(prev_window_best - window_best <= tol && std::isfinite(prev_window_best));
    }
    if (best.objective == 0.0) break;
  }
  best.iterations = iterations_used;
  best.restarts = restarts;
  if (improving_at_budget && best.objective > tol) throw HingeConvergenceError(best);
  return best;
}

BoundTerms bound_terms(double beta, double gamma, double rho, double b_cap, int t, double delta) {
  if (beta <= 0.0 || beta > 1.0) throw std::domain_error("bound_terms: beta must lie in (0,1]");
  if (delta <= 0.0 || delta >= 1.0) throw std::domain_error("bound_terms: delta must lie in (0,1)");
  if (t < 1) throw std::domain_error("bound_terms: t must be >= 1");
  if (gamma < 0.0 || rho < 0.0 || b_cap < 0.0)
    throw std::domain_error("bound_terms: gamma, rho, B must be nonnegative");
  const double log_term = std::log(1.0 / delta);
  const double td = static_cast<double>(t);
  BoundTerms out;
  out.beta = beta;
  out.gamma = gamma;
  out.rho = rho;
  out.b_cap = b_cap;
  out.delta = delta;
  out.t = t;
  const double miss = beta < 1.0
                          ? (1.0 - beta) * (1.0 + std::sqrt(log_term / ((1.0 - beta) * td))) * rho * b_cap
                          : 0.0;
  const double hit = beta * (1.0 - std::sqrt(log_term / (beta * td))) * rho * gamma;
  out.c_t = miss + hit;
  out.r_t = std::sqrt(rho * rho / td);
  out.e_t = std::sqrt(log_term / td);
  return out;
}

std::vector<SemisupPoint> semisup_experiment(const UserGenerator& generator,
                                             const LatentEncoder& encoder,
                                             const SemisupConfig& config, std::uint64_t master_seed,
                                             int threads) {
  const int max_t = *std::max_element(config.t_values.begin(), config.t_values.end());
  if (max_t < 0) throw std::domain_error("semisup_experiment: negative t");
  const Eigen::Index k = config.w_true.size();

  // shared pools: train users at streams [0, max_t), test users at [2^32, ...)
  struct EncodedUser {
    Vec features;  ///< 2 f(x) - 1
    int label = 0;
    double encode_error = 0.0;
  };
  std::vector<EncodedUser> train_pool(max_t);
  parallel_for(static_cast<std::size_t>(max_t), threads, [&](std::size_t i) {
    RngStream rng = derive_stream(master_seed, i);
    const auto [sample, latent] = generator(rng);
    const Vec f = encoder(sample, latent);
    if (f.size() != k) throw std::invalid_argument("semisup_experiment: encoder dimension mismatch");
    train_pool[i].features = 2.0 * f - Vec::Ones(k);
    train_pool[i].label = label_hyperplane(config.w_true, latent);
    train_pool[i].encode_error = norm_error(f, latent.simplex(), Norm::L2);
  });
  std::vector<EncodedUser> test_pool(config.n_test);
  parallel_for(static_cast<std::size_t>(config.n_test), threads, [&](std::size_t i) {
    RngStream rng = derive_stream(master_seed, (1ull << 32) + i);
    const auto [sample, latent] = generator(rng);
    const Vec f = encoder(sample, latent);
    test_pool[i].features = 2.0 * f - Vec::Ones(k);
    test_pool[i].label = label_hyperplane(config.w_true, latent);
  });

  std::vector<SemisupPoint> curve;
  for (const int t : config.t_values) {
    if (t > max_t) throw std::domain_error("semisup_experiment: t exceeds pool");
    SemisupPoint point;
    point.t = t;
    LinearClassifier clf{Vec::Zero(k), config.rho};
    std::vector<double> errors;
    if (t > 0) {
      std::vector<Vec> feats(t);
      std::vector<int> labels(t);
      errors.resize(t);
      for (int i = 0; i < t; ++i) {
        feats[i] = train_pool[i].features;
        labels[i] = train_pool[i].label;
        errors[i] = train_pool[i].encode_error;
      }
      const HingeFit fit = hinge_minimize(feats, labels, config.rho, config.tol,
                                          config.iteration_budget, master_seed ^ 0xABCDull);
      clf = fit.classifier;
      double min_margin = std::numeric_limits<double>::infinity();
      const double wnorm = clf.w.norm();
      for (int i = 0; i < t; ++i)
        min_margin = std::min(min_margin, labels[i] * clf.w.dot(feats[i]) / std::max(wnorm, 1e-300));
      point.margin = min_margin;
      for (int i = 0; i < t; ++i) point.b_cap = std::max(point.b_cap, feats[i].norm());
      // realized encoder quality on the train set: gamma = q95 of the errors,
      // beta = fraction within it
      std::vector<double> sorted = errors;
      std::sort(sorted.begin(), sorted.end());
      point.realized_gamma = sorted[std::min<std::size_t>(sorted.size() - 1,
                                                          static_cast<std::size_t>(0.95 * sorted.size()))];
      int within = 0;
      for (double e : errors)
        if (e <= point.realized_gamma + 1e-15) ++within;
      point.realized_beta = static_cast<double>(within) / static_cast<double>(t);
      point.bound = bound_terms(point.realized_beta, point.realized_gamma, config.rho, point.b_cap,
                                t, config.delta);
    }
    int wrong = 0;
    for (const auto& user : test_pool)
      if (predict_sign(clf, user.features) != user.label) ++wrong;
    point.test_error = static_cast<double>(wrong) / static_cast<double>(config.n_test);
    curve.push_back(point);
  }
  return curve;
}

}  // namespace latentlab
