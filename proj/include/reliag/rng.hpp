#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace reliag {

// splitmix64 output function (Sebastiano Vigna). Used both as a stream
// generator and as the mixing primitive for keyed per-cell streams, so that
// every simulated response is a pure function of (seed, source, query) and
// matrices can be materialized lazily, in any order, on any number of
// workers, with identical bits.
constexpr std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2));
  return splitmix64_next(s);  // full avalanche; sibling keys must decorrelate
}

// Deterministic PRNG with explicitly implemented samplers. std:: distributions
// are implementation-defined, which would break bit-identical reports across
// standard libraries, so the few distributions needed are spelled out here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  // Uniform in [0, 1), 53 random bits.
  double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Unbiased uniform integer in [0, n). Lemire's multiply-shift rejection.
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t x = next_u64();
    unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t threshold = (0 - n) % n;
      while (lo < threshold) {
        x = next_u64();
        m = static_cast<unsigned __int128>(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool bernoulli(double p) { return u01() < p; }

  // Standard normal via Box-Muller. The cosine branch is discarded to keep
  // the stream position independent of call history.
  double normal() {
    double u1 = u01();
    while (u1 <= 0.0) u1 = u01();
    double u2 = u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.28318530717958647692 * u2);
  }

  // Gamma(alpha, 1) via Marsaglia-Tsang squeeze, with the boost for alpha < 1.
  double gamma(double alpha) {
    if (alpha < 1.0) {
      double u = u01();
      while (u <= 0.0) u = u01();
      return gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
    }
    const double d = alpha - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      double u = u01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double beta(double a, double b) {
    double ga = gamma(a);
    double gb = gamma(b);
    return ga / (ga + gb);
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t state_;
};

// Keyed stream for one (seed, a, b, channel) tuple. Channels keep the draws
// for independent purposes (relevance, truthfulness, distractor index, ...)
// on separate streams so adding a draw never perturbs the others.
inline Rng keyed_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                     std::uint64_t channel) {
  std::uint64_t h = mix64(seed, 0xD1B54A32D192ED03ULL + a);
  h = mix64(h, 0xABCC5167CCAD925FULL + b);
  h = mix64(h, 0x2545F4914F6CDD1DULL + channel);
  return Rng(h);
}

}  // namespace reliag
