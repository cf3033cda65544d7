#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace aetas::rng {

// splitmix64 step; the single source of randomness in the project so every
// run is replayable from integer seeds alone.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Seed-mixing scheme: fold each component through splitmix64. Every derived
// stream in the pipeline is mix(seed, tag, indices...), so any single unit
// of work (one document stream, one split-half repeat) can be replayed in
// isolation.
inline std::uint64_t mix(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t state = 0x6a09e667f3bcc908ULL;
  for (std::uint64_t p : parts) {
    state ^= p + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2);
    std::uint64_t s = state;
    state = splitmix64(s);
  }
  return state;
}

// Stream tags used with mix(); kept in one place so derivations are auditable.
enum Tag : std::uint64_t {
  kTagVectorInit = 0xA1,   // per-word embedding init
  kTagPairStream = 0xA2,   // per (epoch, doc) window/subsample draws
  kTagNegatives = 0xA3,    // per (epoch, doc) negative-sample draws
  kTagSplitPartition = 0xB1,  // split-half document shuffle per repeat
  kTagSplitTrain = 0xB2,      // split-half training seed per (repeat, half)
  kTagSynthDoc = 0xC1,        // synthetic corpus per-document stream
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() { return splitmix64(state_); }

  // 53-bit mantissa uniform in [0, 1).
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Unbiased integer in [0, n) via rejection.
  std::uint64_t below(std::uint64_t n) {
    for (;;) {
      std::uint64_t x = next();
      std::uint64_t r = x % n;
      if (x - r <= ~std::uint64_t{0} - (n - 1)) return r;
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace aetas::rng
