#include "latentlab/rng.hpp"

#include "doctest.h"

#include <cmath>
#include <map>
#include <set>
#include <thread>
#include <vector>

using namespace latentlab;

TEST_SUITE_BEGIN("rng");

TEST_CASE("equal (seed, id) pairs give identical sequences") {
  RngStream a = derive_stream(42, 0);
  RngStream b = derive_stream(42, 0);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct stream ids differ") {
  RngStream a = derive_stream(42, 0);
  RngStream b = derive_stream(42, 1);
  int same = 0;
  for (int i = 0; i < 1000; ++i)
    if (a.next_u64() == b.next_u64()) ++same;
  CHECK(same == 0);
}

TEST_CASE("per-stream sequences do not depend on thread count") {
  constexpr int kStreams = 16;
  std::vector<std::vector<std::uint64_t>> serial(kStreams);
  for (int s = 0; s < kStreams; ++s) {
    RngStream rng = derive_stream(42, 7 + s);
    for (int i = 0; i < 100; ++i) serial[s].push_back(rng.next_u64());
  }
  std::vector<std::vector<std::uint64_t>> threaded(kStreams);
  std::vector<std::thread> pool;
  for (int w = 0; w < 8; ++w)
    pool.emplace_back([&, w] {
      for (int s = w; s < kStreams; s += 8) {
        RngStream rng = derive_stream(42, 7 + s);
        for (int i = 0; i < 100; ++i) threaded[s].push_back(rng.next_u64());
      }
    });
  for (auto& t : pool) t.join();
  CHECK(serial == threaded);
}

TEST_CASE("uniform_below stays in range and covers values") {
  RngStream rng = derive_stream(1, 2);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t v = rng.uniform_below(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
  CHECK_THROWS_AS(rng.uniform_below(0), std::domain_error);
}

TEST_CASE("sample_without_replacement returns sorted distinct ids") {
  RngStream rng = derive_stream(3, 4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto sample = rng.sample_without_replacement(100, 12);
    REQUIRE(sample.size() == 12);
    for (std::size_t i = 1; i < sample.size(); ++i) CHECK(sample[i - 1] < sample[i]);
    CHECK(sample.back() < 100);
  }
  CHECK(rng.sample_without_replacement(5, 5).size() == 5);
  CHECK_THROWS_AS(rng.sample_without_replacement(3, 4), std::domain_error);
}

TEST_CASE("subset sampling is uniform over small cases") {
  // all C(5,2) = 10 subsets should appear with equal frequency
  RngStream rng = derive_stream(9, 9);
  std::map<std::vector<std::uint32_t>, int> counts;
  const int n = 20000;
  for (int i = 0; i < n; ++i) counts[rng.sample_without_replacement(5, 2)]++;
  REQUIRE(counts.size() == 10);
  double chi2 = 0.0;
  const double expected = n / 10.0;
  for (const auto& [subset, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 9 + 3 * std::sqrt(18.0));  // df 9, 3 sigma
}

TEST_CASE("normal moments") {
  RngStream rng = derive_stream(5, 6);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(sq / n - 1.0) < 3.0 * std::sqrt(2.0 / n));
}

TEST_SUITE_END();
