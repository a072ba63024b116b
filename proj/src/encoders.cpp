#include "latentlab/encoders.hpp"

#include "latentlab/lp.hpp"
#include "latentlab/oracle.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace latentlab {

PseudoInverse low_variance_pseudoinverse(const Mat& A, double tol) {
  const int k = static_cast<int>(A.cols());
  PseudoInverse out;
  out.B.resize(k, A.rows());
  for (int j = 0; j < k; ++j) {
    Vec e = Vec::Zero(k);
    e[j] = 1.0;
    out.B.row(j) = minimize_infnorm(A, e, tol).coefficients.transpose();
  }
  out.lambda = out.B.cwiseAbs().maxCoeff();
  const Mat res = out.B * A - Mat::Identity(k, k);
  out.residual = res.cwiseAbs().maxCoeff();
  if (out.residual > tol)
    throw std::runtime_error("low_variance_pseudoinverse: residual " + std::to_string(out.residual) +
                             " exceeds tolerance");
  return out;
}

nlohmann::json pseudoinverse_to_json(const PseudoInverse& pinv) {
  nlohmann::json j;
  j["rows"] = pinv.B.rows();
  j["cols"] = pinv.B.cols();
  std::vector<std::vector<double>> b(pinv.B.rows());
  for (Eigen::Index r = 0; r < pinv.B.rows(); ++r) {
    b[r].resize(pinv.B.cols());
    for (Eigen::Index c = 0; c < pinv.B.cols(); ++c) b[r][c] = pinv.B(r, c);
  }
  j["entries"] = std::move(b);
  j["lambda"] = pinv.lambda;
  j["residual"] = pinv.residual;
  j["structure_hash"] = pinv.source_hash;
  return j;
}

PseudoInverse pseudoinverse_from_json(const nlohmann::json& j) {
  PseudoInverse p;
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto entries = j.at("entries").get<std::vector<std::vector<double>>>();
  p.B.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) p.B(r, c) = entries[r][c];
  p.lambda = j.at("lambda").get<double>();
  p.residual = j.at("residual").get<double>();
  p.source_hash = j.at("structure_hash").get<std::uint64_t>();
  return p;
}

Vec threshold_map(const Vec& z, double tau) {
  if (tau < 0.0) throw std::domain_error("threshold_map: tau must be nonnegative");
  Vec out = z;
  for (Eigen::Index i = 0; i < out.size(); ++i)
    if (out[i] < tau) out[i] = 0.0;
  return out;
}

EncoderOutput linear_encode(const PseudoInverse& pinv, const RatingSample& x) {
  const std::uint32_t T = x.size();
  if (T == 0) throw std::domain_error("linear_encode: empty sample");
  const auto k = pinv.B.rows();
  Vec z = Vec::Zero(k);
  for (std::uint32_t id : x.movie_ids) {
    if (static_cast<Eigen::Index>(id) >= pinv.B.cols())
      throw std::out_of_range("linear_encode: movie id out of range");
    z += pinv.B.col(id);
  }
  z /= static_cast<double>(T);
  const double tau =
      2.0 * pinv.lambda * std::sqrt(std::log(static_cast<double>(k)) / static_cast<double>(T));
  EncoderOutput out;
  out.pre_threshold = z;
  out.h_est = threshold_map(z, tau);
  return out;
}

EncoderOutput loglinear_encode(const MovieVectors& vectors, const RatingSample& x) {
  if (x.size() == 0) throw std::domain_error("loglinear_encode: empty sample");
  Vec sum = Vec::Zero(vectors.dim());
  for (std::uint32_t id : x.movie_ids) {
    if (id >= vectors.num_movies()) throw std::out_of_range("loglinear_encode: movie id out of range");
    sum += vectors.W.row(id).transpose();
  }
  const double norm = sum.norm();
  if (norm == 0.0) throw std::domain_error("loglinear_encode: degenerate zero-sum sample");
  EncoderOutput out;
  out.h_est = sum / norm;
  out.sum_norm = norm;
  return out;
}

ValidityReport measure_encoder(const EncoderTrial& trial, int n_trials, double epsilon, Norm norm,
                               std::uint64_t master_seed, std::uint64_t stream_base, int threads) {
  if (n_trials < 1) throw std::domain_error("measure_encoder: need n_trials >= 1");
  std::vector<double> errors(n_trials);
  parallel_for(static_cast<std::size_t>(n_trials), threads, [&](std::size_t i) {
    RngStream rng = derive_stream(master_seed, stream_base + i);
    const auto [estimate, truth] = trial(rng);
    errors[i] = norm_error(estimate, truth, norm);
  });
  ValidityReport rep;
  rep.error_factor = epsilon;
  rep.norm = norm;
  rep.trials = n_trials;
  for (double e : errors)
    if (e <= epsilon) ++rep.successes;
  rep.success_prob = static_cast<double>(rep.successes) / n_trials;
  std::vector<double> sorted = errors;
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) {
    const std::size_t idx = std::min(sorted.size() - 1,
                                     static_cast<std::size_t>(q * static_cast<double>(sorted.size())));
    return sorted[idx];
  };
  rep.err_q50 = quantile(0.50);
  rep.err_q90 = quantile(0.90);
  rep.err_q99 = quantile(0.99);
  rep.errors = std::move(errors);
  return rep;
}

std::vector<ConcentrationReport> loglinear_concentration_report(const MovieVectors& vectors,
                                                                const std::vector<RatingSample>& samples,
                                                                const Vec& h) {
  const Mat basis = oracle::householder_basis(h);
  std::vector<ConcentrationReport> reports;
  reports.reserve(samples.size());
  const double d = static_cast<double>(vectors.dim());
  for (const auto& x : samples) {
    Vec sum = Vec::Zero(vectors.dim());
    for (std::uint32_t id : x.movie_ids) sum += vectors.W.row(id).transpose();
    const Vec coords = basis.transpose() * sum;
    ConcentrationReport rep;
    rep.signal_sum = h.dot(sum);
    rep.offaxis_max_sq = coords.size() > 1 ? coords.tail(coords.size() - 1).cwiseAbs2().maxCoeff() : 0.0;
    rep.ratio = rep.signal_sum != 0.0 ? rep.offaxis_max_sq * d / (rep.signal_sum * rep.signal_sum) : 0.0;
    reports.push_back(rep);
  }
  return reports;
}

}  // namespace latentlab
