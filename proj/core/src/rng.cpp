#include "acsf/rng.hpp"

#include <cmath>

namespace acsf {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
}

double Rng::uniform() {
  // 53-bit mantissa from the top bits of the raw draw.
  return double(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::size_t Rng::uniform_index(std::size_t n) {
  // Rejection-free modulo is biased for huge n; buffer sizes here are far
  // below 2^32 so the bias is immaterial, but reject anyway to keep the
  // stream well-defined.
  if (n == 0) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return std::size_t(x % n);
}

double Rng::normal() {
  if (have_cached_normal_) {
    have_cached_normal_ = false;
    return cached_normal_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  cached_normal_ = r * std::sin(kTwoPi * u2);
  have_cached_normal_ = true;
  return r * std::cos(kTwoPi * u2);
}

double Rng::normal(double mean, double stddev) {
  return mean + stddev * normal();
}

std::vector<double> Rng::uniform_vector(std::size_t n, double lo, double hi) {
  std::vector<double> out(n);
  for (double& x : out) x = uniform(lo, hi);
  return out;
}

Rng Rng::child(std::uint64_t tag) const {
  return Rng(mix_seed(seed_ ^ mix_seed(tag + 0x9e3779b97f4a7c15ull)));
}

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace acsf
