#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "hpasp/error.hpp"
#include "hpasp/grounder.hpp"
#include "hpasp/sampler.hpp"

using namespace hpasp;

namespace {

const char* kEx1 = "0.3::a. 0.4::b.\nq0 ; q1:- a. q0:- b.";
const char* kEx3 = "0.4::b. a:gaussian(0,1).\nq0 ; q1:- below(a,0.5).\nq0:- below(a,0.7), b.\n";
const char* kEx5 = "0.4::b. a:gaussian(0,1).\nq0 ; q1:- below(a,0.5).\nq0:- below(a,0.7), b.\n:- b, below(a,0.2).\n";

EstimateResult run(const char* text, const char* query, SampleConfig cfg, const char* evidence = "") {
  return estimate(prepare(text), parse_conjunction(query), cfg, parse_conjunction(evidence));
}

double three_sigma(double p, double n) { return 3.0 * std::sqrt(p * (1 - p) / n); }

std::vector<std::string> strings(const std::vector<Rule>& rules) {
  std::vector<std::string> out;
  for (const auto& r : rules) out.push_back(to_string(r));
  return out;
}

} // namespace

TEST_CASE("discrete world sampling extremes") {
  const auto all = DiscretizedProgram::from_discrete(prepare("1.0::a. 1.0::b. q :- a."));
  const auto none = DiscretizedProgram::from_discrete(prepare("0.0::a. 0.0::b. q :- a."));
  for (std::uint64_t i = 0; i < 50; ++i) {
    SplitMix64 r1 = SplitMix64::stream(3, i), r2 = SplitMix64::stream(3, i);
    const auto s1 = sample_world_discrete(all, r1);
    CHECK(s1.key == "11");
    CHECK(s1.program.size() == 3);
    const auto s2 = sample_world_discrete(none, r2);
    CHECK(s2.key == "00");
    CHECK(s2.program.size() == 1);
  }
}

TEST_CASE("discrete world frequencies") {
  const auto d = DiscretizedProgram::from_discrete(prepare(kEx1));
  std::map<std::string, int> counts;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    SplitMix64 rng = SplitMix64::stream(11, i);
    ++counts[sample_world_discrete(d, rng).key];
  }
  const std::map<std::string, double> expected{{"00", 0.42}, {"01", 0.28}, {"10", 0.18}, {"11", 0.12}};
  for (const auto& [key, p] : expected) CHECK(std::abs(counts[key] / double(n) - p) <= three_sigma(p, n));
}

TEST_CASE("hybrid sampling reduces rules by comparison truth") {
  const auto high = prepare("1.0::b. a:gaussian(1.2,0.000001).\nq0 ; q1:- below(a,0.5).\nq0:- below(a,0.7), b.\n");
  SplitMix64 r1(5);
  const auto s1 = sample_and_reduce_hybrid(high, r1);
  CHECK(s1.key == "100");
  CHECK(strings(s1.program) == std::vector<std::string>{"b."});
  const auto mid = prepare("1.0::b. a:gaussian(0.6,0.000001).\nq0 ; q1:- below(a,0.5).\nq0:- below(a,0.7), b.\n");
  SplitMix64 r2(5);
  const auto s2 = sample_and_reduce_hybrid(mid, r2);
  CHECK(s2.key == "101");
  CHECK(strings(s2.program) == std::vector<std::string>{"b.", "q0 :- b."});
  const auto between = prepare("a:gaussian(0.6,0.000001). q :- between(a,0.5,0.7). r :- outside(a,0,1).");
  SplitMix64 r3(5);
  const auto s3 = sample_and_reduce_hybrid(between, r3);
  CHECK(s3.key == "1100");  // two between halves, then the two outside copies
  CHECK(strings(s3.program) == std::vector<std::string>{"q."});
}

TEST_CASE("hybrid sampling without comparisons is world sampling") {
  const auto p = prepare(kEx1);
  const auto d = DiscretizedProgram::from_discrete(p);
  for (std::uint64_t i = 0; i < 100; ++i) {
    SplitMix64 r1 = SplitMix64::stream(9, i), r2 = SplitMix64::stream(9, i);
    CHECK(sample_and_reduce_hybrid(p, r1).key == sample_world_discrete(d, r2).key);
  }
}

TEST_CASE("estimates on the golden programs") {
  SampleConfig cfg;
  cfg.n_samples = 100000;
  for (auto mode : {SampleMode::Discrete, SampleMode::Hybrid}) {
    cfg.mode = mode;
    const auto e1 = run(kEx1, "q0", cfg);
    CHECK(std::abs(e1.lower_hat - 0.40) <= 0.012);
    CHECK(std::abs(e1.upper_hat - 0.58) <= 0.012);
    const auto e4 = run(kEx3, "q0", cfg);
    CHECK(std::abs(e4.lower_hat - 0.303) <= 0.012);
    CHECK(std::abs(e4.upper_hat - 0.718) <= 0.012);
    CHECK(e4.samples_taken == 100000);
    CHECK(e4.unsat_samples == 0);
  }
}

TEST_CASE("deterministic program") {
  SampleConfig cfg;
  cfg.n_samples = 17;
  const auto r = run("a. q :- a.", "q", cfg);
  CHECK(r.lower_hat == 1.0);
  CHECK(r.upper_hat == 1.0);
}

TEST_CASE("unsatisfiable samples") {
  SampleConfig cfg;
  cfg.n_samples = 100000;
  const auto raw = run(kEx5, "q0", cfg);
  const double inc = 0.23170388377564122;
  CHECK(std::abs(raw.unsat_samples / 1e5 - inc) <= three_sigma(inc, 1e5));
  CHECK(raw.upper_hat <= 1.0 - raw.unsat_samples / 1e5 + 1e-12);
  cfg.normalize = true;
  const auto norm = run(kEx5, "q0", cfg);
  CHECK(norm.normalized);
  CHECK(std::abs(norm.lower_hat - 0.0931) <= 0.01);
  CHECK(std::abs(norm.upper_hat - 0.6331) <= 0.01);
  try {
    run("0.5::a. :- .", "q", cfg);
    FAIL("expected AllWorldsInconsistent");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AllWorldsInconsistent);
  }
}

TEST_CASE("conditional estimates") {
  SampleConfig cfg;
  cfg.n_samples = 100000;
  for (auto mode : {SampleMode::Discrete, SampleMode::Hybrid}) {
    cfg.mode = mode;
    const auto r = run(kEx3, "q0", cfg, "above(a,0.6)");
    CHECK(std::abs(r.lower_hat - 0.0471) <= 0.01);
    const auto b = run(kEx1, "q0", cfg, "b");
    CHECK(b.lower_hat == 1.0);
  }
}

TEST_CASE("determinism, caching and threads") {
  const auto p = prepare(kEx3);
  SampleConfig cfg;
  cfg.n_samples = 20000;
  cfg.seed = 99;
  cfg.mode = SampleMode::Hybrid;
  const auto a = estimate(p, parse_conjunction("q0"), cfg);
  const auto b = estimate(p, parse_conjunction("q0"), cfg);
  CHECK(a.lower_hat == b.lower_hat);
  CHECK(a.upper_hat == b.upper_hat);
  CHECK(a.cache_hits == b.cache_hits);
  CHECK(a.cache_hits > 0);
  auto off = cfg;
  off.cache_enabled = false;
  const auto c = estimate(p, parse_conjunction("q0"), off);
  CHECK(c.lower_hat == a.lower_hat);
  CHECK(c.upper_hat == a.upper_hat);
  CHECK(c.cache_hits == 0);
  auto capped = cfg;
  capped.cache_max = 0;
  CHECK(estimate(p, parse_conjunction("q0"), capped).cache_hits == 0);
  auto threaded = cfg;
  threaded.threads = 4;
  const auto t = estimate(p, parse_conjunction("q0"), threaded);
  CHECK(t.lower_hat == a.lower_hat);
  CHECK(t.upper_hat == a.upper_hat);
  auto other = cfg;
  other.seed = 100;
  CHECK(estimate(p, parse_conjunction("q0"), other).lower_hat != a.lower_hat);
}

TEST_CASE("invalid sample count") {
  SampleConfig cfg;
  cfg.n_samples = 0;
  CHECK_THROWS_AS(run(kEx1, "q0", cfg), Error);
}

TEST_CASE("sample-size planners") {
  CHECK(samples_for_absolute_error(0.1, 0.05) == 1200);
  CHECK(samples_for_absolute_error(0.5, 1.0) == 4);
  CHECK(samples_for_absolute_error(0.01, 0.05) == 102000);
  CHECK(samples_for_relative_error(0.1, 0.05) == 899);
  CHECK(samples_for_relative_error(1.0, std::exp(-1.0)) == 3);
  CHECK(samples_for_relative_error(0.1, 0.01) == 1382);
  for (auto [e, d] : std::vector<std::pair<double, double>>{{0, 0.5}, {1.5, 0.5}, {0.1, 0}, {0.1, 1.5}, {-1, 0.5}}) {
    CHECK_THROWS_AS(samples_for_absolute_error(e, d), Error);
    CHECK_THROWS_AS(samples_for_relative_error(e, d), Error);
  }
  CHECK_THROWS_AS(samples_for_relative_error(0.1, 1.0), Error);
  try {
    samples_for_absolute_error(0.0, 0.1);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidTolerance);
  }
}
