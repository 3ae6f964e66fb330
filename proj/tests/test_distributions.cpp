#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hpasp/distributions.hpp"
#include "hpasp/error.hpp"
#include "hpasp/grounder.hpp"

using namespace hpasp;

// Reference values from scipy.stats / scipy.special.

TEST_CASE("gaussian cdf and tails") {
  const auto n = DistributionSpec::gaussian(0, 1);
  CHECK(n.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(n.cdf(0.5) == doctest::Approx(0.6914624612740131).epsilon(1e-13));
  CHECK(n.cdf(0.7) == doctest::Approx(0.758036347776927).epsilon(1e-13));
  CHECK(n.cdf(-3.0) == doctest::Approx(0.0013498980316300933).epsilon(1e-12));
  CHECK(n.sf(8.0) == doctest::Approx(6.22096057427174e-16).epsilon(1e-10));
  CHECK(n.cdf(kNegInf) == 0.0);
  CHECK(n.cdf(kPosInf) == 1.0);
  CHECK(n.sf(kNegInf) == 1.0);
  CHECK(n.interval_mass(0.5, 0.7) == doctest::Approx(0.06657388650291385).epsilon(1e-12));
  CHECK(n.interval_mass(kNegInf, kPosInf) == doctest::Approx(1.0));
  CHECK_THROWS_AS(n.interval_mass(1.0, 0.0), Error);
}

TEST_CASE("gaussian scale and symmetry") {
  const auto g = DistributionSpec::gaussian(10, 3);
  CHECK(g.sf(6.0) == doctest::Approx(1.0 - g.cdf(6.0)).epsilon(1e-14));
  const auto s = DistributionSpec::gaussian(2, 2);
  CHECK(s.cdf(3.0) == doctest::Approx(0.6914624612740131).epsilon(1e-13));
  for (double x : {-2.0, -0.3, 0.0, 1.7}) {
    const auto n = DistributionSpec::gaussian(0, 1);
    CHECK(n.cdf(x) + n.cdf(-x) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("gamma cdf") {
  const auto d = DistributionSpec::gamma(70, 1);
  CHECK(d.cdf(60.0) == doctest::Approx(0.11178964695883678).epsilon(1e-11));
  CHECK(d.sf(80.0) == doctest::Approx(0.11859660059001899).epsilon(1e-11));
  const auto s = DistributionSpec::gamma(120, 1);
  CHECK(s.cdf(110.0) == doctest::Approx(0.18170529367601881).epsilon(1e-11));
  CHECK(s.sf(130.0) == doctest::Approx(0.17907180950361468).epsilon(1e-11));
  CHECK(DistributionSpec::gamma(2, 3).cdf(1.0) == doctest::Approx(0.8008517265285442).epsilon(1e-12));
  CHECK(d.cdf(0.0) == 0.0);
  CHECK(d.cdf(-5.0) == 0.0);
  CHECK(d.cdf(kPosInf) == 1.0);
}

TEST_CASE("regularized incomplete gamma") {
  CHECK(regularized_gamma_p(0.5, 2.0) == doctest::Approx(0.9544997361036415).epsilon(1e-13));
  CHECK(regularized_gamma_q(3.0, 10.0) == doctest::Approx(0.0027693957155115775).epsilon(1e-11));
  for (double x : {0.1, 1.0, 4.0}) CHECK(regularized_gamma_p(1.0, x) == doctest::Approx(1.0 - std::exp(-x)));
  CHECK(regularized_gamma_p(5.0, 3.0) + regularized_gamma_q(5.0, 3.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("gamma cdf against numerical integration") {
  // Composite Simpson on the density of gamma(70, 1) over [0, 60].
  const double a = 70.0;
  auto pdf = [&](double x) { return std::exp((a - 1) * std::log(x) - x - std::lgamma(a)); };
  const int n = 20000;
  const double h = 60.0 / n;
  double s = pdf(1e-300) + pdf(60.0);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * pdf(i * h);
  CHECK(DistributionSpec::gamma(70, 1).cdf(60.0) == doctest::Approx(s * h / 3.0).epsilon(1e-8));
}

TEST_CASE("invalid parameters") {
  CHECK_THROWS_AS(DistributionSpec::gaussian(0, 0), Error);
  CHECK_THROWS_AS(DistributionSpec::gaussian(0, -1), Error);
  CHECK_THROWS_AS(DistributionSpec::gamma(0, 1), Error);
  CHECK_THROWS_AS(DistributionSpec::gamma(1, -2), Error);
  try {
    DistributionSpec::gamma(-1, 1);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidParameter);
  }
}

TEST_CASE("second gaussian parameter reading") {
  const auto sd = prepare("a:gaussian(2,4).");
  CHECK(sd.continuous[0].dist.stddev() == 4.0);
  ParseOptions o;
  o.gaussian_param = GaussianParam::Variance;
  const auto var = prepare("a:gaussian(2,4).", o);
  CHECK(var.continuous[0].dist.stddev() == 2.0);
}

TEST_CASE("splitmix streams") {
  SplitMix64 a = SplitMix64::stream(7, 3), b = SplitMix64::stream(7, 3), c = SplitMix64::stream(7, 4);
  const auto x = a(), y = b(), z = c();
  CHECK(x == y);
  CHECK(x != z);
  SplitMix64 u(1);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double v = u.uniform();
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
    sum += v;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("sampling moments") {
  SplitMix64 rng(42);
  const auto g = DistributionSpec::gaussian(3, 2);
  const auto m = DistributionSpec::gamma(70, 1);
  double s1 = 0, s2 = 0, t1 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = g.sample(rng);
    s1 += x;
    s2 += x * x;
    t1 += m.sample(rng);
  }
  const double mean = s1 / n;
  CHECK(mean == doctest::Approx(3.0).epsilon(0.01));
  CHECK(s2 / n - mean * mean == doctest::Approx(4.0).epsilon(0.02));
  CHECK(t1 / n == doctest::Approx(70.0).epsilon(0.002));
}
