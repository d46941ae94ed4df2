#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string_view>

#include <Eigen/Dense>

namespace gsml {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t combine_seed(std::uint64_t seed, std::uint64_t value) {
  return mix64(seed ^ mix64(value + 0x632be59bd9b4e019ULL));
}

inline std::uint64_t fnv1a64(std::span<const unsigned char> bytes,
                             std::uint64_t basis = 0xcbf29ce484222325ULL) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view text) {
  return fnv1a64(std::span<const unsigned char>(
      reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

inline std::uint64_t hash_coordinates(std::uint64_t seed, const Eigen::VectorXd& v) {
  std::uint64_t h = seed;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    std::uint64_t bits = 0;
    double x = v[k] == 0.0 ? 0.0 : v[k];  // fold -0.0 onto +0.0
    std::memcpy(&bits, &x, sizeof bits);
    h = combine_seed(h, bits);
  }
  return h;
}

}  // namespace gsml
