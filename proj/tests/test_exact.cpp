#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hpasp/benchgen.hpp"
#include "hpasp/error.hpp"
#include "hpasp/exact.hpp"
#include "hpasp/grounder.hpp"
#include "oracle.hpp"

using namespace hpasp;

namespace {

const char* kEx1 = "0.3::a. 0.4::b.\nq0 ; q1:- a. q0:- b.";
const char* kEx3 = "0.4::b. a:gaussian(0,1).\nq0 ; q1:- below(a,0.5).\nq0:- below(a,0.7), b.\n";
const char* kEx5 = "0.4::b. a:gaussian(0,1).\nq0 ; q1:- below(a,0.5).\nq0:- below(a,0.7), b.\n:- b, below(a,0.2).\n";
const char* kMixture = "0.4::c.\na:gaussian(10,3).\nb:gaussian(9,2).\nq0:- c, above(a,6.0).\nq0:- not c, above(b,6.0).\n";

Query q(const char* text) {
  Query out;
  for (const auto& e : parse_conjunction(text)) out.push_back(std::get<Literal>(e));
  return out;
}

CredalResult solve(const char* text, const char* query, ExactOptions o = {}, const char* evidence = "") {
  return solve_hybrid(prepare(text), parse_conjunction(query), parse_conjunction(evidence), o);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidArgument;
}

} // namespace

// Analytic values below come from scipy.stats.norm.

TEST_CASE("first example") {
  const auto r = solve(kEx1, "q0");
  CHECK(r.lower == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(r.upper == doctest::Approx(0.58).epsilon(1e-12));
  CHECK(r.inconsistent == 0.0);
  CHECK(r.worlds_enumerated == 4);
  std::vector<double> probs;
  enumerate_worlds(DiscretizedProgram::from_discrete(prepare(kEx1)),
                   [&](const World& w, const std::vector<Rule>&) { probs.push_back(w.probability); });
  REQUIRE(probs.size() == 4);
  const double expected[] = {0.42, 0.28, 0.18, 0.12};
  for (int i = 0; i < 4; ++i) CHECK(probs[i] == doctest::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("world classification") {
  const auto d = DiscretizedProgram::from_discrete(prepare(kEx1));
  std::vector<WorldClass> classes;
  enumerate_worlds(d, [&](const World&, const std::vector<Rule>& prog) { classes.push_back(classify_world(prog, q("q0"))); });
  CHECK(classes == std::vector<WorldClass>{WorldClass::NoContribution, WorldClass::LowerAndUpper, WorldClass::UpperOnly,
                                           WorldClass::LowerAndUpper});
  CHECK(classify_world(prepare(":- .").rules, q("q0")) == WorldClass::Unsatisfiable);
}

TEST_CASE("conditional queries") {
  const auto r = solve(kEx1, "q0", {}, "b");
  CHECK(r.lower == doctest::Approx(1.0));
  CHECK(r.upper == doctest::Approx(1.0));
  const auto a = solve(kEx1, "q0", {}, "a");
  // given a: q0 in all answer sets iff b -> 0.4; in some always -> 1
  CHECK(a.lower == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(a.upper == doctest::Approx(1.0).epsilon(1e-12));
  const auto c = solve(kEx3, "q0", {}, "above(a,0.6)");
  CHECK(c.lower == doctest::Approx(0.04709440066446335).epsilon(1e-9));
  CHECK(c.upper == doctest::Approx(0.04709440066446335).epsilon(1e-9));
  CHECK(kind_of([] { solve("0.0::e. q.", "q", {}, "e"); }) == ErrorKind::UndefinedConditional);
}

TEST_CASE("discretized running example") {
  const auto r = solve(kEx3, "q0");
  CHECK(r.lower == doctest::Approx(0.3032145391107708).epsilon(1e-10));
  CHECK(r.upper == doctest::Approx(0.7180920158751787).epsilon(1e-10));
  const auto d = discretize(prepare(kEx3));
  std::vector<double> probs;
  std::vector<WorldClass> classes;
  enumerate_worlds(d, [&](const World& w, const std::vector<Rule>& prog) {
    probs.push_back(w.probability);
    classes.push_back(classify_world(prog, q("q0")));
  });
  const double table[] = {0.145, 0.040, 0.325, 0.089, 0.097, 0.027, 0.217, 0.060};
  using W = WorldClass;
  const W expected[] = {W::NoContribution, W::NoContribution, W::UpperOnly,     W::UpperOnly,
                        W::NoContribution, W::LowerAndUpper,  W::LowerAndUpper, W::LowerAndUpper};
  for (int i = 0; i < 8; ++i) {
    CHECK(probs[i] == doctest::Approx(table[i]).epsilon(5e-4 / table[i]));
    CHECK(classes[i] == expected[i]);
  }
}

TEST_CASE("normalization with inconsistent worlds") {
  const auto raw = solve(kEx5, "q0");
  CHECK(raw.inconsistent == doctest::Approx(0.23170388377564122).epsilon(1e-10));
  CHECK_FALSE(raw.normalized);
  ExactOptions o;
  o.normalize = true;
  const auto r = solve(kEx5, "q0", o);
  CHECK(r.normalized);
  CHECK(r.lower == doctest::Approx(0.09307694497605265).epsilon(1e-10));
  CHECK(r.upper == doctest::Approx(0.6330737873436052).epsilon(1e-10));
  CHECK(kind_of([&] { solve("0.5::a. :- .", "q", o); }) == ErrorKind::AllWorldsInconsistent);
}

TEST_CASE("conservation identity") {
  for (const char* text : {kEx1, kEx3, kEx5, kMixture}) {
    const auto pos = solve(text, "q0");
    const auto neg = solve(text, "not q0");
    CHECK(pos.lower + neg.upper + pos.inconsistent == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(neg.lower + pos.upper + pos.inconsistent == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("mixture of gaussians") {
  const auto r = solve(kMixture, "q0");
  CHECK(r.lower == doctest::Approx(0.923431191348338).epsilon(1e-10));
  CHECK(r.upper == doctest::Approx(0.923431191348338).epsilon(1e-10));
}

TEST_CASE("threads and caching do not change results") {
  const auto p = prepare(gen_t1(8));
  ExactOptions base;
  base.cache = false;
  const auto ref = solve_hybrid(p, parse_conjunction("q0"), {}, base);
  for (unsigned t : {1U, 3U, 8U}) {
    for (bool cache : {false, true}) {
      ExactOptions o;
      o.threads = t;
      o.cache = cache;
      const auto r = solve_hybrid(p, parse_conjunction("q0"), {}, o);
      CHECK(r.lower == ref.lower);
      CHECK(r.upper == ref.upper);
      CHECK(r.inconsistent == ref.inconsistent);
    }
  }
}

TEST_CASE("world cap") {
  ExactOptions o;
  o.world_cap = 3;
  try {
    solve(gen_t1(4).c_str(), "q0", o);
    FAIL("expected WorldCapExceeded");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::WorldCapExceeded);
    CHECK(e.is_limit());
  }
}

TEST_CASE("blood-pressure program against the cell-by-cell oracle") {
  for (int n : {1, 2}) {
    const auto p = prepare(gen_t5(n));
    const auto r = solve_hybrid(p, parse_conjunction("high_number_strokes"), {});
    const auto ref = oracle::hybrid_credal(p, "high_number_strokes");
    CHECK(r.lower == doctest::Approx(ref.lower).epsilon(1e-12));
    CHECK(r.upper == doctest::Approx(ref.upper).epsilon(1e-12));
    CHECK(r.inconsistent == doctest::Approx(ref.inconsistent).epsilon(1e-12));
  }
}

TEST_CASE("compensated sum") {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000000; ++i) s.add(1e-16);
  s.add(-1.0);
  CHECK(s.value() == doctest::Approx(1e-10).epsilon(1e-6));
}

TEST_CASE("comparison atoms folded into indicators") {
  std::vector<ComparisonAtom> cs;
  const auto folded = fold_comparisons(parse_conjunction("b, above(a,0.6), not c"), cs);
  REQUIRE(folded.size() == 3);
  CHECK(to_string(folded[1].atom) == "__ev(0)");
  CHECK(cs.size() == 1);
}
