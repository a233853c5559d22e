#pragma once

#include <cstdint>
#include <random>

namespace qpol {

using Rng = std::mt19937_64;

// Seed of the i-th stream of a run rooted at `root`. The derivation is the
// splitmix64 finalizer applied to root + (i+1) * golden ratio, so distinct
// stream indices give statistically independent engine seeds and the mapping
// is a documented pure function: two processes that agree on (root, i) agree
// on the stream.
inline std::uint64_t stream_seed(std::uint64_t root, std::uint64_t stream) {
  std::uint64_t x = root + (stream + 1) * 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline Rng make_stream(std::uint64_t root, std::uint64_t stream) {
  return Rng(stream_seed(root, stream));
}

// FNV-1a, used to fingerprint config files in report metadata.
inline std::uint64_t fnv1a64(const char* data, std::size_t n) {
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace qpol
