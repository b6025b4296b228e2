#pragma once

#include <cstdint>
#include <random>

namespace borps {

// Deterministic uniform source. Every sampler in the library consumes
// uniforms from here only, so a fixed seed reproduces every draw bitwise.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(mix(seed)) {}

  // Independent substream for chain/bootstrap index `stream`.
  static Rng derive(std::uint64_t master, std::uint64_t stream) {
    return Rng(mix(master) ^ mix(0x9E3779B97F4A7C15ULL * (stream + 1)));
  }

  // Uniform on the open interval (0,1); never returns 0 or 1.
  double uniform() { return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer on [0, n), n > 0.
  std::uint64_t integer(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

 private:
  // splitmix64 finalizer; decorrelates adjacent seeds before mt19937_64 init.
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  std::mt19937_64 gen_;
};

}  // namespace borps
