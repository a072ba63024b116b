#pragma once

#include "latentlab/core.hpp"
#include "latentlab/rng.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>

namespace latentlab {

enum class EmissionMode { WithoutReplacement, Independent };

/// Linear mixture (genre/topic) generative model.
struct MixtureModel {
  GenreStructure structure;
  std::uint32_t genres_per_user = 1;   ///< s
  std::uint32_t ratings_per_user = 1;  ///< T
  EmissionMode emission = EmissionMode::WithoutReplacement;

  void validate() const;
};

/// Shared-core family: every genre contains the same core of round(p*m) movies,
/// remaining movies are unique to their genre. Movie ids are assigned by a
/// random permutation.
GenreStructure make_shared_core(std::uint32_t m, std::uint32_t k, double p, RngStream& rng);

/// Uniformly random partition of [M] into k genres of size M/k.
GenreStructure make_disjoint_partition(std::uint32_t num_movies, std::uint32_t k, RngStream& rng);

/// Rejection-samples k random m-subsets of [M] until all pairwise intersections
/// are at most delta*m; throws after max_attempts rejections per genre.
GenreStructure make_bounded_overlap(std::uint32_t num_movies, std::uint32_t m, std::uint32_t k,
                                    double delta, RngStream& rng, int max_attempts = 1000);

/// Uniformly random s-subset of the k genres.
BinaryLatent sample_user(std::uint32_t k, std::uint32_t s, RngStream& rng);

/// Dirichlet(alpha) mixing weights on the user's liked genres (the uniform 1/s
/// weighting is the alpha -> infinity limit and the default elsewhere).
Vec dirichlet_simplex(const BinaryLatent& user, double alpha, RngStream& rng);

/// Emits a rating sample: a uniform T-subset of the union of liked genres in
/// without-replacement mode, or T i.i.d. draws from A * h_simplex otherwise.
RatingSample emit(const MixtureModel& model, const BinaryLatent& user, RngStream& rng);

/// Independent-mode emission with explicit mixing weights over the k genres.
RatingSample emit_weighted(const MixtureModel& model, const BinaryLatent& user, const Vec& weights,
                           RngStream& rng);

/// T independent draws from the user's mixture distribution, in draw order.
/// Prefixes of the sequence are themselves valid emissions, which lets sweeps
/// over T share randomness.
std::vector<std::uint32_t> independent_draw_sequence(const GenreStructure& structure,
                                                     const BinaryLatent& user, const Vec& weights,
                                                     std::uint32_t T, RngStream& rng);

/// M x k matrix with column j uniform (1/m) on genre j's members.
Mat movie_genre_matrix(const GenreStructure& structure);

/// sgn(<w, 2h - 1>); throws on an exact tie so the caller can resample w.
int label_hyperplane(const Vec& w, const BinaryLatent& h);

/// 1 iff the movie belongs to one of the user's liked genres.
int label_likes_movie(const GenreStructure& structure, const BinaryLatent& h, std::uint32_t movie_id);

nlohmann::json structure_to_json(const GenreStructure& structure);
GenreStructure structure_from_json(const nlohmann::json& j);

/// FNV-1a hash of the canonical JSON serialization, used to tie serialized
/// pseudo-inverses to their source structure.
std::uint64_t structure_hash(const GenreStructure& structure);

}  // namespace latentlab
