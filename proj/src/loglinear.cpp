#include "latentlab/loglinear.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace latentlab {

namespace {

void require_unit(const Vec& h) {
  if (std::abs(h.norm() - 1.0) > 1e-9)
    throw std::domain_error("log-linear latent must have unit l2 norm");
}

constexpr char kMagic[8] = {'L', 'L', 'M', 'V', '0', '0', '0', '1'};

}  // namespace

MovieVectors sample_movie_vectors(std::uint32_t num_movies, std::uint32_t dim, double b_scale,
                                  RngStream& rng) {
  if (num_movies == 0 || dim == 0) throw std::domain_error("sample_movie_vectors: need M, d >= 1");
  if (b_scale < 0.0) throw std::domain_error("sample_movie_vectors: B must be nonnegative");
  const double sd = b_scale / (2.0 * std::sqrt(static_cast<double>(dim)));
  Mat w(num_movies, dim);
  for (std::uint32_t i = 0; i < num_movies; ++i)
    for (std::uint32_t j = 0; j < dim; ++j) w(i, j) = rng.normal(0.0, sd);
  return {std::move(w), b_scale};
}

Vec sample_sphere_latent(std::uint32_t dim, RngStream& rng) {
  Vec h(dim);
  for (;;) {
    for (std::uint32_t i = 0; i < dim; ++i) h[i] = rng.normal();
    const double n = h.norm();
    if (n > 1e-12) return h / n;
  }
}

double log_partition_function(const MovieVectors& vectors, const Vec& h) {
  require_unit(h);
  if (vectors.W.cols() != h.size())
    throw std::invalid_argument("partition_function: dimension mismatch");
  const Vec v = vectors.W * h;
  const double vmax = v.maxCoeff();
  return vmax + std::log((v.array() - vmax).exp().sum());
}

double partition_function(const MovieVectors& vectors, const Vec& h) {
  return std::exp(log_partition_function(vectors, h));
}

Vec emission_probabilities(const MovieVectors& vectors, const Vec& h) {
  require_unit(h);
  const Vec v = vectors.W * h;
  const double vmax = v.maxCoeff();
  Vec p = (v.array() - vmax).exp();
  p /= p.sum();
  return p;
}

std::vector<std::uint32_t> loglinear_draw_sequence(const MovieVectors& vectors, const Vec& h,
                                                   std::uint32_t T, RngStream& rng) {
  if (T == 0) throw std::domain_error("emit_loglinear: T must be positive");
  const Vec p = emission_probabilities(vectors, h);
  const std::uint32_t m = vectors.num_movies();
  Vec cdf(m);
  double acc = 0.0;
  for (std::uint32_t i = 0; i < m; ++i) {
    acc += p[i];
    cdf[i] = acc;
  }
  std::vector<std::uint32_t> draws;
  draws.reserve(T);
  for (std::uint32_t t = 0; t < T; ++t) {
    const double u = rng.uniform01() * acc;
    const auto it = std::lower_bound(cdf.data(), cdf.data() + m, u);
    draws.push_back(std::min<std::uint32_t>(static_cast<std::uint32_t>(it - cdf.data()), m - 1));
  }
  return draws;
}

LogLinearSample emit_loglinear(const MovieVectors& vectors, const Vec& h, std::uint32_t T,
                               RngStream& rng) {
  LogLinearSample out;
  out.latent = h;
  out.sample.mode = ReplacementMode::Multiset;
  out.sample.movie_ids = loglinear_draw_sequence(vectors, h, T, rng);
  std::sort(out.sample.movie_ids.begin(), out.sample.movie_ids.end());
  return out;
}

double analytic_mean_partition(std::uint32_t num_movies, std::uint32_t dim, double b_scale) {
  return static_cast<double>(num_movies) *
         std::exp(b_scale * b_scale / (8.0 * static_cast<double>(dim)));
}

ZConcentrationReport z_concentration_report(const MovieVectors& vectors, int n_latents,
                                            double epsilon, RngStream& rng) {
  if (n_latents < 1) throw std::domain_error("z_concentration_report: need n_latents >= 1");
  const double expected = analytic_mean_partition(vectors.num_movies(), vectors.dim(), vectors.b_scale);
  ZConcentrationReport rep;
  rep.epsilon = epsilon;
  rep.n_latents = n_latents;
  double sum = 0.0;
  int within = 0;
  for (int i = 0; i < n_latents; ++i) {
    const Vec h = sample_sphere_latent(vectors.dim(), rng);
    const double ratio = partition_function(vectors, h) / expected;
    sum += ratio;
    rep.max_dev = std::max(rep.max_dev, std::abs(ratio - 1.0));
    if (std::abs(ratio - 1.0) <= epsilon) ++within;
  }
  rep.mean_ratio = sum / n_latents;
  rep.frac_within = static_cast<double>(within) / n_latents;
  return rep;
}

void save_movie_vectors(const std::string& path, const MovieVectors& vectors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_movie_vectors: cannot open " + path);
  const std::uint64_t m = vectors.num_movies(), d = vectors.dim();
  {
    // JSON metadata sidecar describing the flat binary layout
    std::ofstream meta(path + ".json");
    meta << "{\"format\":\"row-major float64\",\"M\":" << m << ",\"d\":" << d
         << ",\"B\":" << vectors.b_scale << "}\n";
  }
  out.write(kMagic, sizeof(kMagic));
  out.write(reinterpret_cast<const char*>(&m), sizeof(m));
  out.write(reinterpret_cast<const char*>(&d), sizeof(d));
  out.write(reinterpret_cast<const char*>(&vectors.b_scale), sizeof(double));
  for (std::uint64_t i = 0; i < m; ++i) {
    const Vec row = vectors.W.row(static_cast<Eigen::Index>(i)).transpose();
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(d * sizeof(double)));
  }
  if (!out) throw std::runtime_error("save_movie_vectors: write failed");
}

MovieVectors load_movie_vectors(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_movie_vectors: cannot open " + path);
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("load_movie_vectors: bad header");
  std::uint64_t m = 0, d = 0;
  double b = 0.0;
  in.read(reinterpret_cast<char*>(&m), sizeof(m));
  in.read(reinterpret_cast<char*>(&d), sizeof(d));
  in.read(reinterpret_cast<char*>(&b), sizeof(b));
  MovieVectors out;
  out.b_scale = b;
  out.W.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
  std::vector<double> row(d);
  for (std::uint64_t i = 0; i < m; ++i) {
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(d * sizeof(double)));
    for (std::uint64_t j = 0; j < d; ++j) out.W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
  }
  if (!in) throw std::runtime_error("load_movie_vectors: truncated file");
  return out;
}

}  // namespace latentlab
