#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace latentlab {

/// Counter-derived random stream with pinned draw semantics.
///
/// All distribution helpers are implemented on top of the raw 64-bit engine
/// output so that sequences depend only on (master_seed, stream_id) and never
/// on the standard library's unspecified distribution algorithms. Streams are
/// cheap to construct; parallel code derives one stream per work item and the
/// results are identical under any thread count.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, bound). Rejection sampling, exactly uniform.
  std::uint64_t uniform_below(std::uint64_t bound) {
    if (bound == 0) throw std::domain_error("uniform_below: bound must be positive");
    // mask rejection: accept draws below the largest multiple of bound
    const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
    for (;;) {
      const std::uint64_t x = engine_();
      if (x < limit) return x % bound;
    }
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; the second deviate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 == 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * kPi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Uniformly random k-subset of {0,...,n-1}, returned sorted (Floyd's method).
  std::vector<std::uint32_t> sample_without_replacement(std::uint32_t n, std::uint32_t k);

  template <class T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Derives the stream identified by (master_seed, stream_id). Equal pairs give
/// identical sequences; distinct ids give statistically independent streams.
RngStream derive_stream(std::uint64_t master_seed, std::uint64_t stream_id);

}  // namespace latentlab
