#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <string_view>

namespace cqc {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Seed of a named child stream. Every random consumer derives its own
// stream from the run seed, so adding a consumer never shifts another.
inline std::uint64_t stream_seed(std::uint64_t root, std::string_view stream,
                                 std::initializer_list<std::uint64_t> keys = {}) {
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a over the stream name
  for (unsigned char c : stream) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::uint64_t state = splitmix64(root ^ splitmix64(h));
  for (auto key : keys) state = splitmix64(state ^ splitmix64(key + 0x632be59bd9b4e019ull));
  return state;
}

using Rng = std::mt19937_64;

// Unbiased index in [0, n), identical on every standard library.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  const std::uint64_t range = n;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  while (true) {
    const std::uint64_t r = rng();
    if (r < limit) return static_cast<std::size_t>(r % range);
  }
}

}  // namespace cqc
