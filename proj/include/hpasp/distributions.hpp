#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string>

namespace hpasp {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

/// How the second argument of `gaussian(m, x)` is read.
enum class GaussianParam { StdDev, Variance };

/// A continuous distribution attached to a random variable. Gaussian stores
/// its standard deviation regardless of how the source text spelled it.
class DistributionSpec {
public:
  enum class Family { Gaussian, Gamma };

  static DistributionSpec gaussian(double mean, double stddev);
  static DistributionSpec gamma(double shape, double rate);

  Family family() const noexcept { return family_; }
  double mean() const noexcept { return a_; }
  double stddev() const noexcept { return b_; }
  double shape() const noexcept { return a_; }
  double rate() const noexcept { return b_; }

  /// P(X <= x). Accepts the infinities.
  double cdf(double x) const;
  /// P(X > x), computed directly for tail accuracy.
  double sf(double x) const;
  /// P(lo <= X <= hi); throws InvalidInterval when lo > hi.
  double interval_mass(double lo, double hi) const;

  template <class Rng>
  double sample(Rng& rng) const {
    if (family_ == Family::Gaussian) {
      return std::normal_distribution<double>(a_, b_)(rng);
    }
    return std::gamma_distribution<double>(a_, 1.0 / b_)(rng);
  }

  std::string to_string() const;
  bool operator==(const DistributionSpec&) const = default;

private:
  DistributionSpec(Family f, double a, double b) : family_(f), a_(a), b_(b) {}

  Family family_;
  double a_;
  double b_;
};

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

/// SplitMix64: a tiny counter-style generator. Seeding it through
/// `stream(seed, index)` gives every sample its own reproducible stream.
class SplitMix64 {
public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64(mix(seed ^ mix(index + 0x632be59bd9b4e019ULL)));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

private:
  std::uint64_t state_;
};

} // namespace hpasp
