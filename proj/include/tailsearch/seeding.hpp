#pragma once

#include <cstdint>
#include <string_view>

namespace tailsearch {

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix64(seed ^ mix64(stream ^ 0x6a09e667f3bcc909ULL));
}

template <typename... Streams>
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                    Streams... rest) noexcept {
  return derive_seed(derive_seed(seed, stream), static_cast<std::uint64_t>(rest)...);
}

// 64-bit FNV-1a; stable across platforms, unlike std::hash.
constexpr std::uint64_t hash_string(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Maps 64 random bits to a double in [0, 1).
constexpr double to_unit_interval(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace tailsearch
