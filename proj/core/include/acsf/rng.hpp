#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace acsf {

/// Deterministic random source. Uniform and normal draws are implemented
/// explicitly (not via std:: distributions) so that identical seeds yield
/// identical streams independent of the standard library build.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n).
  std::size_t uniform_index(std::size_t n);
  /// Standard normal via Box-Muller.
  double normal();
  double normal(double mean, double stddev);

  std::vector<double> uniform_vector(std::size_t n, double lo, double hi);

  /// Derive an independent child stream; stable in (seed, tag).
  Rng child(std::uint64_t tag) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_ = 0;
  std::mt19937_64 engine_;
  bool have_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

/// SplitMix64 scramble; used for deriving child seeds.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace acsf
