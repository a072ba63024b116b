#include "latentlab/mixture.hpp"

#include "latentlab/oracle.hpp"

#include "doctest.h"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

using namespace latentlab;

TEST_SUITE_BEGIN("mixture");

TEST_CASE("shared-core structure: counts from the construction") {
  RngStream rng = derive_stream(50, 0);
  const auto s = make_shared_core(4, 2, 0.5, rng);
  CHECK(s.num_movies == 6);
  CHECK(s.genre_size() == 4);
  // core of 2 movies shared between the two genres
  std::vector<std::uint32_t> common;
  std::set_intersection(s.genres[0].begin(), s.genres[0].end(), s.genres[1].begin(),
                        s.genres[1].end(), std::back_inserter(common));
  CHECK(common.size() == 2);
  s.validate();
}

TEST_CASE("disjoint partition: 3 genres of 2 partition {0..5}") {
  RngStream rng = derive_stream(50, 1);
  const auto s = make_disjoint_partition(6, 3, rng);
  CHECK(s.num_genres() == 3);
  CHECK(s.genre_size() == 2);
  std::set<std::uint32_t> all;
  for (const auto& g : s.genres) all.insert(g.begin(), g.end());
  CHECK(all.size() == 6);
  s.validate();
  CHECK_THROWS_AS(make_disjoint_partition(7, 3, rng), std::domain_error);
}

TEST_CASE("bounded-overlap: pairwise intersections verified by set arithmetic") {
  RngStream rng = derive_stream(50, 2);
  const auto s = make_bounded_overlap(4000, 100, 10, 0.05, rng);
  s.validate();  // includes the exhaustive pairwise check
  for (std::size_t a = 0; a < s.genres.size(); ++a)
    for (std::size_t b = a + 1; b < s.genres.size(); ++b) {
      std::vector<std::uint32_t> common;
      std::set_intersection(s.genres[a].begin(), s.genres[a].end(), s.genres[b].begin(),
                            s.genres[b].end(), std::back_inserter(common));
      CHECK(common.size() <= 5);
    }
}

TEST_CASE("bounded-overlap: infeasible parameters raise a construction error") {
  RngStream rng = derive_stream(50, 3);
  // total genre mass vastly exceeds the pool at delta = 0: rejection cannot win
  CHECK_THROWS_AS(make_bounded_overlap(40, 20, 4, 0.0, rng, 50), std::runtime_error);
}

TEST_CASE("sample_user: forced full support and sparsity invariant") {
  RngStream rng = derive_stream(51, 0);
  const auto full = sample_user(5, 5, rng);
  CHECK(full.genre_ids == std::vector<std::uint32_t>{0, 1, 2, 3, 4});
  for (int i = 0; i < 100; ++i) CHECK(sample_user(9, 3, rng).sparsity() == 3);
  CHECK_THROWS_AS(sample_user(2, 3, rng), std::domain_error);
}

TEST_CASE("sample_user: k=2, s=1 is an unbiased coin") {
  RngStream rng = derive_stream(51, 1);
  int first = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i)
    if (sample_user(2, 1, rng).genre_ids[0] == 0) ++first;
  CHECK(std::abs(first - n / 2) < 3.0 * std::sqrt(n * 0.25));
}

TEST_CASE("emit: union of size T returns the whole union") {
  RngStream rng = derive_stream(52, 0);
  MixtureModel model;
  model.structure = make_disjoint_partition(8, 4, rng);
  model.genres_per_user = 2;
  model.ratings_per_user = 4;
  const BinaryLatent user{4, {0, 2}};
  const auto x = emit(model, user, rng);
  CHECK(x.movie_ids == model.structure.genre_union({0, 2}));
}

TEST_CASE("emit: support stays inside the union in both modes") {
  RngStream rng = derive_stream(52, 1);
  MixtureModel model;
  model.structure = make_shared_core(10, 4, 0.5, rng);
  model.genres_per_user = 2;
  model.ratings_per_user = 7;
  for (EmissionMode mode : {EmissionMode::WithoutReplacement, EmissionMode::Independent}) {
    model.emission = mode;
    for (int i = 0; i < 200; ++i) {
      const auto user = sample_user(4, 2, rng);
      const auto uni = model.structure.genre_union(user.genre_ids);
      for (std::uint32_t id : emit(model, user, rng).movie_ids)
        CHECK(std::binary_search(uni.begin(), uni.end(), id));
    }
  }
}

TEST_CASE("emit: disjoint structure with s=1 stays in the liked genre") {
  RngStream rng = derive_stream(52, 2);
  MixtureModel model;
  model.structure = make_disjoint_partition(40, 4, rng);
  model.genres_per_user = 1;
  model.ratings_per_user = 5;
  const BinaryLatent user{4, {3}};
  const auto& genre = model.structure.genres[3];
  for (int i = 0; i < 100; ++i)
    for (std::uint32_t id : emit(model, user, rng).movie_ids)
      CHECK(std::binary_search(genre.begin(), genre.end(), id));
}

TEST_CASE("emit: set-mode per-movie marginal is uniform over the genre") {
  RngStream rng = derive_stream(52, 3);
  MixtureModel model;
  model.structure = make_shared_core(20, 3, 0.5, rng);
  model.genres_per_user = 1;
  model.ratings_per_user = 10;
  const BinaryLatent user{3, {0}};
  const auto& genre = model.structure.genres[0];
  std::map<std::uint32_t, int> freq;
  const int trials = 100000;
  for (int i = 0; i < trials; ++i)
    for (std::uint32_t id : emit(model, user, rng).movie_ids) ++freq[id];
  // chi-square against the exact uniform marginal T/m per movie
  const double expected = trials * 10.0 / 20.0;
  double chi2 = 0.0;
  for (std::uint32_t id : genre) chi2 += (freq[id] - expected) * (freq[id] - expected) / expected;
  const double df = 19.0;
  CHECK(chi2 < df + 3.0 * std::sqrt(2.0 * df));
}

TEST_CASE("emit: set mode is exchangeable over T-subsets (enumerated cells)") {
  RngStream rng = derive_stream(52, 4);
  MixtureModel model;
  model.structure = make_disjoint_partition(8, 1, rng);  // union of size 8
  model.genres_per_user = 1;
  model.ratings_per_user = 3;
  const BinaryLatent user{1, {0}};
  std::map<std::vector<std::uint32_t>, int> counts;
  const int trials = 56 * 2000;
  for (int i = 0; i < trials; ++i) ++counts[emit(model, user, rng).movie_ids];
  REQUIRE(counts.size() == 56);  // C(8,3) cells, all hit
  const double expected = trials / 56.0;
  double chi2 = 0.0;
  for (const auto& [cell, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  const double df = 55.0;
  CHECK(chi2 < df + 3.0 * std::sqrt(2.0 * df));
}

TEST_CASE("emit: independent-mode marginal equals A * h_simplex") {
  RngStream rng = derive_stream(52, 5);
  MixtureModel model;
  model.structure = make_shared_core(6, 4, 0.5, rng);
  model.genres_per_user = 2;
  model.ratings_per_user = 4;
  model.emission = EmissionMode::Independent;
  const BinaryLatent user{4, {1, 3}};
  const Vec marginal = movie_genre_matrix(model.structure) * user.simplex();
  std::vector<int> freq(model.structure.num_movies, 0);
  const int trials = 25000;  // 10^5 draws at T=4
  for (int i = 0; i < trials; ++i)
    for (std::uint32_t id : emit(model, user, rng).movie_ids) ++freq[id];
  const double total = trials * 4.0;
  double chi2 = 0.0;
  int cells = 0;
  for (std::uint32_t id = 0; id < model.structure.num_movies; ++id) {
    if (marginal[id] == 0.0) {
      CHECK(freq[id] == 0);
      continue;
    }
    ++cells;
    const double expected = total * marginal[id];
    chi2 += (freq[id] - expected) * (freq[id] - expected) / expected;
  }
  const double df = cells - 1;
  CHECK(chi2 < df + 3.0 * std::sqrt(2.0 * df));
}

TEST_CASE("movie_genre_matrix: disjoint M=4, k=2 gives half-half columns") {
  GenreStructure s;
  s.variant = StructureVariant::DisjointPartition;
  s.num_movies = 4;
  s.genres = {{0, 1}, {2, 3}};
  const Mat a = movie_genre_matrix(s);
  CHECK(a(0, 0) == doctest::Approx(0.5));
  CHECK(a(1, 0) == doctest::Approx(0.5));
  CHECK(a(2, 1) == doctest::Approx(0.5));
  CHECK(a(0, 1) == 0.0);
}

TEST_CASE("movie_genre_matrix: column sums are 1; p=1 core makes it rank one") {
  RngStream rng = derive_stream(53, 0);
  for (const auto& s : {make_shared_core(10, 3, 0.4, rng), make_disjoint_partition(12, 4, rng),
                        make_bounded_overlap(200, 20, 5, 0.2, rng)}) {
    const Mat a = movie_genre_matrix(s);
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      CHECK(a.col(c).sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto degenerate = make_shared_core(5, 3, 1.0, rng);
  const Mat a = movie_genre_matrix(degenerate);
  CHECK((a.col(0) - a.col(1)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.col(0) - a.col(2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("label_hyperplane examples") {
  Vec w = Vec::Zero(2);
  w[0] = 1.0;
  CHECK(label_hyperplane(w, BinaryLatent{2, {0}}) == 1);
  CHECK(label_hyperplane(w, BinaryLatent{2, {1}}) == -1);
  Vec ones = Vec::Ones(4);
  CHECK_THROWS_AS(label_hyperplane(ones, BinaryLatent{4, {0, 1}}), std::domain_error);
}

TEST_CASE("label_likes_movie examples") {
  RngStream rng = derive_stream(53, 1);
  const auto s = make_shared_core(6, 3, 0.5, rng);
  const BinaryLatent user{3, {1}};
  for (std::uint32_t id : s.genres[1]) CHECK(label_likes_movie(s, user, id) == 1);
  // a movie unique to genre 0 is unliked by a genre-1 user
  for (std::uint32_t id : s.genres[0])
    if (!std::binary_search(s.genres[1].begin(), s.genres[1].end(), id))
      CHECK(label_likes_movie(s, user, id) == 0);
  // every core movie is liked by every user
  std::vector<std::uint32_t> core;
  std::set_intersection(s.genres[0].begin(), s.genres[0].end(), s.genres[2].begin(),
                        s.genres[2].end(), std::back_inserter(core));
  for (std::uint32_t id : core)
    for (std::uint32_t g = 0; g < 3; ++g) CHECK(label_likes_movie(s, BinaryLatent{3, {g}}, id) == 1);
  CHECK_THROWS_AS(label_likes_movie(s, user, s.num_movies), std::out_of_range);
}

TEST_CASE("structure JSON round-trip preserves everything") {
  RngStream rng = derive_stream(53, 2);
  const auto s = make_shared_core(8, 3, 0.25, rng);
  const auto j = structure_to_json(s);
  const auto back = structure_from_json(j);
  CHECK(back.num_movies == s.num_movies);
  CHECK(back.genres == s.genres);
  CHECK(back.variant == s.variant);
  CHECK(structure_hash(back) == structure_hash(s));
  auto mutated = s;
  mutated.genres[0][0] = mutated.genres[0][0];  // unchanged
  CHECK(structure_hash(mutated) == structure_hash(s));
}

TEST_CASE("dirichlet mixing weights live on the user's support") {
  RngStream rng = derive_stream(53, 3);
  const BinaryLatent user{5, {0, 2, 4}};
  for (double alpha : {0.5, 1.0, 8.0}) {
    const Vec w = dirichlet_simplex(user, alpha, rng);
    CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w[1] == 0.0);
    CHECK(w[3] == 0.0);
    CHECK(w.minCoeff() >= 0.0);
  }
}

TEST_CASE("emit validates T against the union in set mode") {
  RngStream rng = derive_stream(53, 4);
  MixtureModel model;
  model.structure = make_disjoint_partition(8, 4, rng);
  model.genres_per_user = 1;
  model.ratings_per_user = 3;  // genre size is 2
  CHECK_THROWS_AS(emit(model, BinaryLatent{4, {0}}, rng), std::domain_error);
}

TEST_SUITE_END();
