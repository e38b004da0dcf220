#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>

namespace ikm {

/// Max-shifted log of sum of exponentials; -inf entries are skipped and an
/// all -inf (or empty) input yields -inf.
inline double logsumexp(std::span<const double> values) {
  const double inf = std::numeric_limits<double>::infinity();
  double m = -inf;
  for (double v : values) m = std::max(m, v);
  if (m == -inf) return -inf;
  double acc = 0.0;
  for (double v : values) {
    if (v > -inf) acc += std::exp(v - m);
  }
  return m + std::log(acc);
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from a master seed and a stream tag.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) {
  std::uint64_t s = master ^ (0x632be59bd9b4e019ULL * (tag + 1));
  return splitmix64(s);
}

inline std::mt19937_64 make_rng(std::uint64_t master, std::uint64_t tag = 0) {
  return std::mt19937_64(derive_seed(master, tag));
}

/// Uniform double in [0, 1) from the top 53 bits; portable across stdlibs.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer index in [0, n).
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  std::size_t i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
  return i >= n ? n - 1 : i;
}

inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64_doubles(std::span<const double> xs,
                                     std::uint64_t h = 0xcbf29ce484222325ULL) {
  return fnv1a64(xs.data(), xs.size() * sizeof(double), h);
}

}  // namespace ikm
