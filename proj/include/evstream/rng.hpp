#pragma once

#include <cstdint>
#include <span>

namespace evstream {

// splitmix64: tiny, well-mixed, and byte-for-byte reproducible across
// platforms, which the benchmark's seeded-payload contract requires.
struct SplitMix64 {
  uint64_t state = 0;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
};

// Derive an independent stream seed (per publisher, per cell, ...).
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  SplitMix64 s(seed ^ (0xa0761d6478bd642full * (stream + 1)));
  return s.next();
}

// Incompressible, deterministic payload bytes; one generator per publisher,
// consumed sequentially across that publisher's sends.
class PayloadGenerator {
 public:
  explicit PayloadGenerator(uint64_t seed) : rng_(seed) {}

  void fill(std::span<uint8_t> out) {
    size_t i = 0;
    while (i + 8 <= out.size()) {
      uint64_t w = rng_.next();
      for (int b = 0; b < 8; ++b) out[i++] = static_cast<uint8_t>(w >> (8 * b));
    }
    if (i < out.size()) {
      uint64_t w = rng_.next();
      for (; i < out.size(); ++i) {
        out[i] = static_cast<uint8_t>(w);
        w >>= 8;
      }
    }
  }

 private:
  SplitMix64 rng_;
};

}  // namespace evstream
