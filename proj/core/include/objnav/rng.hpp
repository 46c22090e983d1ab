#pragma once

#include <cstdint>
#include <initializer_list>

namespace objnav {

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a base seed and any number of tags.
template <typename... Tags>
constexpr std::uint64_t mix_seed(std::uint64_t base, Tags... tags) {
  std::uint64_t h = splitmix64(base);
  for (std::uint64_t t : std::initializer_list<std::uint64_t>{static_cast<std::uint64_t>(tags)...}) {
    h = splitmix64(h ^ t);
  }
  return h;
}

}  // namespace objnav
