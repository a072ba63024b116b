#include "latentlab/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <stdexcept>
#include <thread>

namespace latentlab {

double norm_error(const Vec& h_est, const Vec& h_true, Norm norm) {
  if (h_est.size() != h_true.size())
    throw std::invalid_argument("norm_error: dimension mismatch");
  const Vec diff = h_est - h_true;
  const double denom = (norm == Norm::L1) ? h_true.lpNorm<1>() : h_true.norm();
  if (denom == 0.0) throw std::domain_error("norm_error: reference vector has zero norm");
  const double num = (norm == Norm::L1) ? diff.lpNorm<1>() : diff.norm();
  return num / denom;
}

double lipschitz_transfer_bound(double alpha, double error_factor, double h_norm) {
  if (alpha < 0 || error_factor < 0 || h_norm < 0)
    throw std::domain_error("lipschitz_transfer_bound: negative argument");
  return error_factor * alpha * h_norm;
}

std::string to_string(StructureVariant v) {
  switch (v) {
    case StructureVariant::SharedCore: return "shared-core";
    case StructureVariant::DisjointPartition: return "disjoint-partition";
    case StructureVariant::BoundedOverlap: return "bounded-overlap";
  }
  return "?";
}

void GenreStructure::validate() const {
  if (genres.empty()) throw std::runtime_error("GenreStructure: no genres");
  const std::size_t m = genres[0].size();
  for (const auto& g : genres) {
    if (g.size() != m) throw std::runtime_error("GenreStructure: unequal genre sizes");
    if (!std::is_sorted(g.begin(), g.end())) throw std::runtime_error("GenreStructure: genre not sorted");
    if (std::adjacent_find(g.begin(), g.end()) != g.end())
      throw std::runtime_error("GenreStructure: duplicate id inside a genre");
    if (!g.empty() && g.back() >= num_movies) throw std::runtime_error("GenreStructure: id out of range");
  }
  auto intersection_size = [](const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    std::size_t i = 0, j = 0, count = 0;
    while (i < a.size() && j < b.size()) {
      if (a[i] < b[j]) ++i;
      else if (a[i] > b[j]) ++j;
      else { ++count; ++i; ++j; }
    }
    return count;
  };
  switch (variant) {
    case StructureVariant::SharedCore: {
      const std::size_t core = static_cast<std::size_t>(std::llround(core_fraction * static_cast<double>(m)));
      // the core is the mutual intersection; non-core ids must be unique to one genre
      std::vector<std::uint32_t> common = genres[0];
      for (std::size_t gi = 1; gi < genres.size(); ++gi) {
        std::vector<std::uint32_t> next;
        std::set_intersection(common.begin(), common.end(), genres[gi].begin(), genres[gi].end(),
                              std::back_inserter(next));
        common.swap(next);
      }
      if (genres.size() > 1 && common.size() != core)
        throw std::runtime_error("GenreStructure: shared core has wrong size");
      for (std::size_t a = 0; a < genres.size(); ++a)
        for (std::size_t b = a + 1; b < genres.size(); ++b)
          if (intersection_size(genres[a], genres[b]) != core)
            throw std::runtime_error("GenreStructure: non-core ids shared between genres");
      break;
    }
    case StructureVariant::DisjointPartition: {
      if (genres.size() * m != num_movies)
        throw std::runtime_error("GenreStructure: disjoint partition must cover all movies");
      std::vector<bool> seen(num_movies, false);
      for (const auto& g : genres)
        for (std::uint32_t id : g) {
          if (seen[id]) throw std::runtime_error("GenreStructure: partition overlap");
          seen[id] = true;
        }
      break;
    }
    case StructureVariant::BoundedOverlap: {
      const double cap = max_overlap * static_cast<double>(m);
      for (std::size_t a = 0; a < genres.size(); ++a)
        for (std::size_t b = a + 1; b < genres.size(); ++b)
          if (static_cast<double>(intersection_size(genres[a], genres[b])) > cap)
            throw std::runtime_error("GenreStructure: pairwise overlap exceeds delta*m");
      break;
    }
  }
}

std::vector<std::uint32_t> GenreStructure::genre_union(const std::vector<std::uint32_t>& genre_ids) const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t g : genre_ids) {
    if (g >= genres.size()) throw std::out_of_range("genre_union: genre id out of range");
    std::vector<std::uint32_t> merged;
    merged.reserve(out.size() + genres[g].size());
    std::set_union(out.begin(), out.end(), genres[g].begin(), genres[g].end(), std::back_inserter(merged));
    out.swap(merged);
  }
  return out;
}

Vec BinaryLatent::indicator() const {
  Vec v = Vec::Zero(num_genres);
  for (std::uint32_t g : genre_ids) v[g] = 1.0;
  return v;
}

Vec BinaryLatent::simplex() const {
  Vec v = Vec::Zero(num_genres);
  if (genre_ids.empty()) return v;
  const double w = 1.0 / static_cast<double>(genre_ids.size());
  for (std::uint32_t g : genre_ids) v[g] = w;
  return v;
}

std::vector<std::uint32_t> RatingSample::counts(std::uint32_t num_movies) const {
  std::vector<std::uint32_t> c(num_movies, 0);
  for (std::uint32_t id : movie_ids) {
    if (id >= num_movies) throw std::out_of_range("RatingSample::counts: id out of range");
    ++c[id];
  }
  return c;
}

void RatingSample::validate() const {
  if (!std::is_sorted(movie_ids.begin(), movie_ids.end()))
    throw std::runtime_error("RatingSample: ids not sorted");
  if (mode == ReplacementMode::Set &&
      std::adjacent_find(movie_ids.begin(), movie_ids.end()) != movie_ids.end())
    throw std::runtime_error("RatingSample: duplicate id in set mode");
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

int default_thread_count() {
  if (const char* env = std::getenv("LATENTLAB_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace latentlab
