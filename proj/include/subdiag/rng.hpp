#pragma once

#include <cstdint>
#include <random>

#include "subdiag/types.hpp"

namespace subdiag {

// Deterministic random source.  All randomness in the library flows through
// this class so a seed reproduces the same stream on every platform:
// mt19937_64 output is specified by the standard, and the Gaussian transform
// below avoids std::normal_distribution, whose stream is not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  // Identifier recorded in reports so a reader can reproduce the stream.
  static const char* id() { return "mt19937_64+box-muller"; }

  std::uint64_t seed() const { return seed_; }

  // Uniform in (0, 1], 53-bit resolution.  The open end sits at zero so the
  // value is always a valid log argument.
  double uniform() {
    return static_cast<double>((gen_() >> 11) + 1) * 0x1p-53;
  }

  // Standard normal, Box-Muller, one value per call (two words consumed).
  double gaussian() {
    const double u = uniform();
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * pi_ * v);
  }

  // Complex Gaussian with independent N(0, 1/2) parts, so E|z|^2 = 1.
  Complex cgaussian() {
    const double u = uniform();
    const double v = uniform();
    const double r = std::sqrt(-std::log(u));
    return {r * std::cos(2.0 * pi_ * v), r * std::sin(2.0 * pi_ * v)};
  }

  // Integer in [0, bound) by rejection, unbiased.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % bound;
  }

  // Independent child stream; same (seed, index) always gives the same child.
  Rng child(std::uint64_t index) const {
    return Rng(splitmix64(seed_ + 0x9e3779b97f4a7c15ULL * (index + 1)));
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  static constexpr double pi_ = 3.141592653589793238462643383279502884;

  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace subdiag
