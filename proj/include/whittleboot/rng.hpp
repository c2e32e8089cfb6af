#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace whittleboot {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent generator for (seed, key...): the same keys always give the same
/// stream, regardless of which thread asks.
inline Rng stream_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return Rng(seq);
}

/// Stream tags, so different consumers of one seed never share draws.
enum class Stream : std::uint64_t {
  replicate = 1,
  subsample = 2,
  data = 3,
  exact = 4,
  oracle = 5,
  test = 6,
};

inline Rng stream_rng(std::uint64_t seed, Stream tag, std::uint64_t index, std::uint64_t attempt = 0) {
  return stream_rng(seed, {static_cast<std::uint64_t>(tag), index, attempt});
}

}  // namespace whittleboot
