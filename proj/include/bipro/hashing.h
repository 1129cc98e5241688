#ifndef BIPRO_HASHING_H_
#define BIPRO_HASHING_H_

#include <cstdint>
#include <string_view>

// Small deterministic hashing kit. Everything that must be reproducible
// bit-for-bit across platforms (mock model weights, beam RNG streams,
// sampling) goes through these instead of std:: distributions.

namespace bipro::hashing {

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

/// FNV-1a over raw bytes, chainable via the `h` accumulator.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = kFnvOffset) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

/// Feed a 64-bit value into the chain as 8 little-endian bytes.
inline std::uint64_t fnv1a_u64(std::uint64_t v, std::uint64_t h = kFnvOffset) {
  for (int i = 0; i < 8; ++i) {
    h ^= static_cast<unsigned char>(v >> (8 * i));
    h *= kFnvPrime;
  }
  return h;
}

/// Feed a single separator/tag byte into the chain.
inline std::uint64_t fnv1a_byte(unsigned char b, std::uint64_t h) {
  h ^= b;
  h *= kFnvPrime;
  return h;
}

/// Finalizer with good avalanche; standard splitmix64 step.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Map a hash to [0, 1) using the top 53 bits.
inline double to_unit_interval(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace bipro::hashing

#endif  // BIPRO_HASHING_H_
