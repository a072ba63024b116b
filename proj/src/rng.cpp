#include "latentlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace latentlab {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

RngStream derive_stream(std::uint64_t master_seed, std::uint64_t stream_id) {
  std::uint64_t state = master_seed;
  std::uint64_t mixed = splitmix64(state);
  state ^= stream_id * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull;
  mixed ^= splitmix64(state);
  mixed = splitmix64(mixed);
  return RngStream(mixed);
}

std::vector<std::uint32_t> RngStream::sample_without_replacement(std::uint32_t n, std::uint32_t k) {
  if (k > n) throw std::domain_error("sample_without_replacement: k exceeds n");
  std::vector<std::uint32_t> out;
  out.reserve(k);
  if (k == 0) return out;
  if (3ull * k >= n) {
    // dense case: partial Fisher-Yates over the full index range
    std::vector<std::uint32_t> idx(n);
    for (std::uint32_t i = 0; i < n; ++i) idx[i] = i;
    for (std::uint32_t i = 0; i < k; ++i) {
      const std::uint32_t j = i + static_cast<std::uint32_t>(uniform_below(n - i));
      std::swap(idx[i], idx[j]);
    }
    out.assign(idx.begin(), idx.begin() + k);
  } else {
    std::unordered_set<std::uint32_t> chosen;
    chosen.reserve(2 * k);
    for (std::uint32_t j = n - k; j < n; ++j) {
      const std::uint32_t t = static_cast<std::uint32_t>(uniform_below(j + 1));
      if (!chosen.insert(t).second) chosen.insert(j);
      // j itself is always insertable: j was not a candidate in earlier rounds
    }
    out.assign(chosen.begin(), chosen.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace latentlab
