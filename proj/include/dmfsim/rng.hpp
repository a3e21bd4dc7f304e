#pragma once

#include <cmath>
#include <cstdint>

namespace dmfsim {

// Counter-based pseudo-randomness. Every draw is a pure function of
// (key, counter), so streams are random-access, trivially parallel and
// extendable: drawing N values and then N+1 values from the same key
// yields the same first N values.

// splitmix64 finalizer; out(i) = splitmix64(key + i*GAMMA) reproduces the
// splitmix64 sequence seeded at `key`.
inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Chain-hash a seed with tag words. Used to carve independent substreams
// out of a master seed: derive_seed(master, stream_tag, n, replicate, ...).
inline constexpr std::uint64_t derive_seed(std::uint64_t seed) {
  return splitmix64(seed ^ 0x5851f42d4c957f2dULL);
}

template <class... Rest>
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t part,
                                           Rest... rest) {
  return derive_seed(splitmix64(seed ^ splitmix64(part)), rest...);
}

// Compile-time tag from a short string literal, for naming seed streams.
inline constexpr std::uint64_t stream_tag(const char* s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (; *s != '\0'; ++s) {
    h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(*s));
    h *= 0x100000001b3ULL;
  }
  return h;
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  // Random access: value at counter i, independent of the cursor.
  std::uint64_t at(std::uint64_t i) const { return splitmix64(key_ + i * kGolden); }

  std::uint64_t next_u64() { return at(counter_++); }

  // Uniform on the open interval (0,1); never returns 0 or 1, so quantile
  // transforms are safe.
  double next_unit() { return to_unit(next_u64()); }
  double unit_at(std::uint64_t i) const { return to_unit(at(i)); }

  // Unbiased-enough index in [0,n): fixed-point multiply, bias O(n/2^64).
  std::uint64_t next_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  double next_exponential() { return -std::log(next_unit()); }

  std::uint64_t counter() const { return counter_; }
  std::uint64_t key() const { return key_; }

  static double to_unit(std::uint64_t r) {
    return (static_cast<double>(r >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace dmfsim
