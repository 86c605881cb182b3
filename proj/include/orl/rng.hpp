#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace orl {

// All randomness in the harness flows through this wrapper. The mt19937_64
// engine is fully specified by the standard; the transforms below are
// hand-rolled so that streams are reproducible across standard libraries
// (implementation-defined <random> distributions are never used).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform in {0, ..., n-1}. Modulo bias is negligible for the small n
  // used here (action counts, arm counts).
  int uniform_int(int n) {
    return static_cast<int>(gen_() % static_cast<std::uint64_t>(n));
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller; consumes two draws per call.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::mt19937_64 gen_;
};

std::uint64_t fnv1a64(std::string_view bytes);

// Per-stage seed derivation: master seed combined with a stable hash of the
// stage name and a repetition index. No wall-clock entropy anywhere.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stage,
                          std::uint64_t index = 0);

}  // namespace orl
