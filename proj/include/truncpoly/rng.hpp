#pragma once

#include <cstdint>
#include <string_view>

namespace truncpoly {

// Counter-based PRNG (splitmix64 core). Streams are keyed by
// (seed, tag, subtag) so independent operations never share state and the
// output sequence is identical across platforms and thread counts.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t tag = 0) : key_(mix(mix(seed) ^ tag)) {}

  static std::uint64_t hash_tag(std::string_view name) {
    // FNV-1a
    std::uint64_t h = 1469598103934665603ull;
    for (char c : name) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    return h;
  }

  Rng derive(std::uint64_t subtag) const {
    Rng r(0);
    r.key_ = mix(key_ ^ mix(subtag + 0x9e3779b97f4a7c15ull));
    return r;
  }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ull); }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace truncpoly
