#include "latentlab/mixture.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace latentlab {

void MixtureModel::validate() const {
  structure.validate();
  const std::uint32_t k = structure.num_genres();
  if (genres_per_user == 0 || genres_per_user > k)
    throw std::domain_error("MixtureModel: need 1 <= s <= k");
  if (emission == EmissionMode::WithoutReplacement &&
      static_cast<std::uint64_t>(genres_per_user) * structure.genre_size() < ratings_per_user)
    throw std::domain_error("MixtureModel: s*m < T in without-replacement mode");
}

GenreStructure make_shared_core(std::uint32_t m, std::uint32_t k, double p, RngStream& rng) {
  if (m == 0 || k == 0) throw std::domain_error("make_shared_core: m, k must be positive");
  if (p < 0.0 || p > 1.0) throw std::domain_error("make_shared_core: p outside [0,1]");
  const std::uint32_t core = static_cast<std::uint32_t>(std::llround(p * static_cast<double>(m)));
  const std::uint32_t unique = m - core;
  const std::uint32_t total = core + k * unique;
  std::vector<std::uint32_t> ids(total);
  for (std::uint32_t i = 0; i < total; ++i) ids[i] = i;
  rng.shuffle(ids);
  GenreStructure s;
  s.variant = StructureVariant::SharedCore;
  s.num_movies = total;
  s.core_fraction = p;
  s.genres.resize(k);
  const std::vector<std::uint32_t> core_ids(ids.begin(), ids.begin() + core);
  for (std::uint32_t g = 0; g < k; ++g) {
    auto& genre = s.genres[g];
    genre = core_ids;
    const std::size_t offset = core + static_cast<std::size_t>(g) * unique;
    genre.insert(genre.end(), ids.begin() + offset, ids.begin() + offset + unique);
    std::sort(genre.begin(), genre.end());
  }
  s.validate();
  return s;
}

GenreStructure make_disjoint_partition(std::uint32_t num_movies, std::uint32_t k, RngStream& rng) {
  if (k == 0 || num_movies % k != 0)
    throw std::domain_error("make_disjoint_partition: M must be a positive multiple of k");
  const std::uint32_t m = num_movies / k;
  std::vector<std::uint32_t> ids(num_movies);
  for (std::uint32_t i = 0; i < num_movies; ++i) ids[i] = i;
  rng.shuffle(ids);
  GenreStructure s;
  s.variant = StructureVariant::DisjointPartition;
  s.num_movies = num_movies;
  s.genres.resize(k);
  for (std::uint32_t g = 0; g < k; ++g) {
    s.genres[g].assign(ids.begin() + static_cast<std::size_t>(g) * m,
                       ids.begin() + static_cast<std::size_t>(g + 1) * m);
    std::sort(s.genres[g].begin(), s.genres[g].end());
  }
  s.validate();
  return s;
}

GenreStructure make_bounded_overlap(std::uint32_t num_movies, std::uint32_t m, std::uint32_t k,
                                    double delta, RngStream& rng, int max_attempts) {
  if (m == 0 || k == 0 || m > num_movies)
    throw std::domain_error("make_bounded_overlap: need 0 < m <= M");
  const double cap = delta * static_cast<double>(m);
  GenreStructure s;
  s.variant = StructureVariant::BoundedOverlap;
  s.num_movies = num_movies;
  s.max_overlap = delta;
  s.genres.reserve(k);
  auto intersection_size = [](const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    std::size_t i = 0, j = 0, count = 0;
    while (i < a.size() && j < b.size()) {
      if (a[i] < b[j]) ++i;
      else if (a[i] > b[j]) ++j;
      else { ++count; ++i; ++j; }
    }
    return count;
  };
  for (std::uint32_t g = 0; g < k; ++g) {
    bool placed = false;
    for (int attempt = 0; attempt < max_attempts && !placed; ++attempt) {
      auto candidate = rng.sample_without_replacement(num_movies, m);
      placed = true;
      for (const auto& other : s.genres)
        if (static_cast<double>(intersection_size(candidate, other)) > cap) {
          placed = false;
          break;
        }
      if (placed) s.genres.push_back(std::move(candidate));
    }
    if (!placed)
      throw std::runtime_error("make_bounded_overlap: rejection budget exhausted for genre " +
                               std::to_string(g) + " (delta too small for these M, m, k)");
  }
  s.validate();
  return s;
}

BinaryLatent sample_user(std::uint32_t k, std::uint32_t s, RngStream& rng) {
  if (s == 0 || s > k) throw std::domain_error("sample_user: need 1 <= s <= k");
  return BinaryLatent{k, rng.sample_without_replacement(k, s)};
}

Vec dirichlet_simplex(const BinaryLatent& user, double alpha, RngStream& rng) {
  if (alpha <= 0.0) throw std::domain_error("dirichlet_simplex: alpha must be positive");
  // gamma draws via Marsaglia-Tsang, boosted for alpha < 1
  auto gamma_draw = [&](double shape) {
    double boost = 1.0;
    if (shape < 1.0) {
      boost = std::pow(rng.uniform01(), 1.0 / shape);
      shape += 1.0;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = rng.normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = rng.uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return boost * d * v;
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return boost * d * v;
    }
  };
  Vec w = Vec::Zero(user.num_genres);
  double total = 0.0;
  for (std::uint32_t g : user.genre_ids) {
    w[g] = gamma_draw(alpha);
    total += w[g];
  }
  if (total <= 0.0) throw std::runtime_error("dirichlet_simplex: degenerate draw");
  w /= total;
  return w;
}

RatingSample emit(const MixtureModel& model, const BinaryLatent& user, RngStream& rng) {
  return emit_weighted(model, user, user.simplex(), rng);
}

RatingSample emit_weighted(const MixtureModel& model, const BinaryLatent& user, const Vec& weights,
                           RngStream& rng) {
  const std::uint32_t T = model.ratings_per_user;
  RatingSample out;
  if (model.emission == EmissionMode::WithoutReplacement) {
    const auto uni = model.structure.genre_union(user.genre_ids);
    if (T > uni.size()) throw std::domain_error("emit: T exceeds union size in set mode");
    const auto picks = rng.sample_without_replacement(static_cast<std::uint32_t>(uni.size()), T);
    out.mode = ReplacementMode::Set;
    out.movie_ids.reserve(T);
    for (std::uint32_t p : picks) out.movie_ids.push_back(uni[p]);
    // union and picks are sorted, so the sample is too
  } else {
    out.mode = ReplacementMode::Multiset;
    out.movie_ids = independent_draw_sequence(model.structure, user, weights, T, rng);
    std::sort(out.movie_ids.begin(), out.movie_ids.end());
  }
  return out;
}

std::vector<std::uint32_t> independent_draw_sequence(const GenreStructure& structure,
                                                     const BinaryLatent& user, const Vec& weights,
                                                     std::uint32_t T, RngStream& rng) {
  // pick a liked genre by weight, then a uniform member: exactly A*h per draw
  const std::uint32_t s = user.sparsity();
  std::vector<double> cumulative(s);
  double acc = 0.0;
  for (std::uint32_t i = 0; i < s; ++i) {
    acc += weights[user.genre_ids[i]];
    cumulative[i] = acc;
  }
  if (std::abs(acc - 1.0) > 1e-9) throw std::domain_error("independent_draw_sequence: weights must sum to 1");
  std::vector<std::uint32_t> draws;
  draws.reserve(T);
  const std::uint32_t m = structure.genre_size();
  for (std::uint32_t t = 0; t < T; ++t) {
    const double u = rng.uniform01() * acc;
    const std::uint32_t gi = static_cast<std::uint32_t>(
        std::lower_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    const auto& genre = structure.genres[user.genre_ids[std::min(gi, s - 1)]];
    draws.push_back(genre[rng.uniform_below(m)]);
  }
  return draws;
}

Mat movie_genre_matrix(const GenreStructure& structure) {
  Mat a = Mat::Zero(structure.num_movies, structure.num_genres());
  const double w = 1.0 / static_cast<double>(structure.genre_size());
  for (std::uint32_t g = 0; g < structure.num_genres(); ++g)
    for (std::uint32_t id : structure.genres[g]) a(id, g) = w;
  return a;
}

int label_hyperplane(const Vec& w, const BinaryLatent& h) {
  if (w.size() != h.num_genres) throw std::invalid_argument("label_hyperplane: dimension mismatch");
  const double ip = w.dot(2.0 * h.indicator() - Vec::Ones(h.num_genres));
  if (ip == 0.0) throw std::domain_error("label_hyperplane: tie, resample w");
  return ip > 0.0 ? 1 : -1;
}

int label_likes_movie(const GenreStructure& structure, const BinaryLatent& h, std::uint32_t movie_id) {
  if (movie_id >= structure.num_movies) throw std::out_of_range("label_likes_movie: id out of range");
  for (std::uint32_t g : h.genre_ids) {
    const auto& genre = structure.genres[g];
    if (std::binary_search(genre.begin(), genre.end(), movie_id)) return 1;
  }
  return 0;
}

nlohmann::json structure_to_json(const GenreStructure& structure) {
  nlohmann::json j;
  j["variant"] = to_string(structure.variant);
  j["num_movies"] = structure.num_movies;
  if (structure.variant == StructureVariant::SharedCore) j["core_fraction"] = structure.core_fraction;
  if (structure.variant == StructureVariant::BoundedOverlap) j["max_overlap"] = structure.max_overlap;
  j["genres"] = structure.genres;
  return j;
}

GenreStructure structure_from_json(const nlohmann::json& j) {
  GenreStructure s;
  const std::string variant = j.at("variant").get<std::string>();
  if (variant == "shared-core") s.variant = StructureVariant::SharedCore;
  else if (variant == "disjoint-partition") s.variant = StructureVariant::DisjointPartition;
  else if (variant == "bounded-overlap") s.variant = StructureVariant::BoundedOverlap;
  else throw std::runtime_error("structure_from_json: unknown variant " + variant);
  s.num_movies = j.at("num_movies").get<std::uint32_t>();
  s.core_fraction = j.value("core_fraction", 0.0);
  s.max_overlap = j.value("max_overlap", 0.0);
  s.genres = j.at("genres").get<std::vector<std::vector<std::uint32_t>>>();
  s.validate();
  return s;
}

std::uint64_t structure_hash(const GenreStructure& structure) {
  const std::string dump = structure_to_json(structure).dump();
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace latentlab
