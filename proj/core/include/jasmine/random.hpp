#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace jasmine {

/// Engine used for every stochastic draw. Distribution helpers below avoid the
/// implementation-defined std:: distributions so streams are reproducible
/// across standard libraries.
using Engine = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// Stable 64-bit hash of a label (FNV-1a); used to name RNG streams.
std::uint64_t stable_hash(std::string_view label);

/// Derive a child seed from a parent seed and a sequence of components.
/// Order matters; identical inputs always give the same stream.
class SeedPath {
 public:
  explicit SeedPath(std::uint64_t root) : state_(splitmix64(root)) {}

  SeedPath with(std::uint64_t component) const;
  SeedPath with(std::string_view label) const;

  std::uint64_t seed() const { return state_; }
  Engine engine() const { return Engine(state_); }

 private:
  struct Raw {};
  SeedPath(Raw, std::uint64_t state) : state_(state) {}
  std::uint64_t state_;
};

/// Uniform integer in [0, n). n must be positive.
std::size_t uniform_index(Engine& rng, std::size_t n);

/// Uniform real in [0, 1) with 53 random bits.
double uniform01(Engine& rng);

/// Uniform real in [lo, hi).
double uniform_real(Engine& rng, double lo, double hi);

/// Standard normal draw (Box-Muller, no cached second value).
double standard_normal(Engine& rng);

/// Fisher-Yates shuffle driven by uniform_index.
template <typename T>
void shuffle(std::vector<T>& values, Engine& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(values[i - 1], values[j]);
  }
}

/// k distinct draws from [0, n) in selection order. Requires k <= n.
std::vector<std::size_t> sample_without_replacement(Engine& rng, std::size_t n, std::size_t k);

}  // namespace jasmine
