#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hpasp/benchgen.hpp"
#include "hpasp/error.hpp"
#include "hpasp/exact.hpp"
#include "hpasp/grounder.hpp"

using namespace hpasp;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidArgument;
}

std::vector<double> between_bounds(const std::vector<Rule>& rules, bool with_d) {
  std::vector<double> out;
  for (const auto& r : rules) {
    bool has_d = false;
    for (const auto& e : r.body) {
      if (const auto* l = std::get_if<Literal>(&e)) has_d = has_d || to_string(l->atom) == "d";
    }
    if (has_d != with_d) continue;
    for (const auto& e : r.body) {
      if (const auto* c = std::get_if<ComparisonAtom>(&e)) {
        out.push_back(c->value(0));
        out.push_back(c->value(1));
      }
    }
  }
  return out;
}

const char* kExample2 = R"(0.4::pred_d(1..4).
0.6::pred_s(1..4).
d(1..4):gamma(70,1).
s(1..4):gamma(120,1).
prob_d(P):- outside(d(P), 60, 80).
prob_s(P):- outside(s(P), 110, 130).
prob(P):- prob_d(P), pred_d(P).
prob(P):- prob_s(P), pred_s(P).
stroke(P);not_stroke(P):- prob(P).
:- #count{X:prob(X)}=P, #count{X:stroke(X),prob(X)}=S, 10*S < 4*P.
high_number_strokes:- #count{X : stroke(X)}=CS, CS > 1.
)";

} // namespace

TEST_CASE("t1 listing") {
  CHECK(gen_t1(2) ==
        "0.5::d1.\nc1:gaussian(0,1).\nq0 :- below(c1,0.5), not q1.\nq1 :- below(c1,0.5), not q0.\n"
        "q0 :- below(c1,0.7), d1.\n");
  const auto p = prepare(gen_t1(4));
  CHECK(p.facts.size() == 2);
  CHECK(p.continuous.size() == 2);
  CHECK(p.rules.size() == 6);
  for (int n = 2; n <= 20; n += 2) CHECK_NOTHROW(prepare(gen_t1(n)));
  CHECK(kind_of([] { gen_t1(3); }) == ErrorKind::InvalidSize);
  CHECK(kind_of([] { gen_t1(0); }) == ErrorKind::InvalidSize);
}

TEST_CASE("t2 listing") {
  CHECK(gen_t2(2, 2) ==
        "0.5::d0.\n0.5::d1.\nc1:gaussian(0,1).\nc2:gaussian(0,1).\n"
        "q0 :- below(c1,0.5), not q1.\nq1 :- below(c1,0.5), not q0.\n"
        "q0 :- below(c2,0.5), not q1.\nq1 :- below(c2,0.5), not q0.\n"
        "q0 :- below(c1,0.7), d0.\nq0 :- below(c2,0.7), d1.\n");
  const auto p = prepare(gen_t2(5, 1));
  CHECK(p.facts.size() == 5);
  std::set<std::string> used;
  for (const auto& r : p.rules) {
    for (const auto& e : r.body) {
      if (const auto* l = std::get_if<Literal>(&e)) used.insert(to_string(l->atom));
    }
  }
  std::size_t unused = 0;
  for (const auto& f : p.facts) unused += used.count(to_string(f.atom)) ? 0 : 1;
  CHECK(unused == 4);
  CHECK(gen_t2(2, 3).find("q0 :- below(c3,0.7), d0.") != std::string::npos);
  CHECK(kind_of([] { gen_t2(0, 2); }) == ErrorKind::InvalidSize);
}

TEST_CASE("t3 listing") {
  CHECK(gen_t3(2, 3) ==
        "0.5::d1.\n0.5::d2.\n0.5::d3.\nc0:gaussian(0,1).\nc1:gaussian(0,1).\n"
        "q0 :- below(c0,0.5), not q1.\nq1 :- below(c0,0.5), not q0.\n"
        "q0 :- below(c1,0.5), not q1.\nq1 :- below(c1,0.5), not q0.\n"
        "q0 :- below(c0,0.7), d1.\nq0 :- below(c1,0.7), d2.\nq0 :- below(c0,0.7), d3.\n");
  const auto p = prepare(gen_t3(1, 1));
  CHECK(p.facts.size() + p.continuous.size() == 2);
  for (int k : {1, 2, 5}) {
    for (int n : {1, 4, 7}) CHECK(prepare(gen_t3(k, n)).rules.size() == std::size_t(2 * k + n));
  }
  CHECK(kind_of([] { gen_t3(2, 0); }) == ErrorKind::InvalidSize);
}

TEST_CASE("t4 structure") {
  const std::string text = gen_t4(2, 7);
  CHECK(text.rfind("0.4::d.\nc:gaussian(0,10).\nq0:- between(c,-30,", 0) == 0);
  CHECK(text == gen_t4(2, 7));
  CHECK(text != gen_t4(2, 8));
  for (int n : {1, 2, 5, 70}) {
    const auto p = prepare(gen_t4(n, 3));
    CHECK(p.facts.size() == 1);
    CHECK(p.continuous.size() == 1);
    CHECK(p.rules.size() == std::size_t(3 * n));
    for (bool with_d : {false, true}) {
      const auto b = between_bounds(p.rules, with_d);
      REQUIRE(b.size() >= 2);
      CHECK(b.front() == -30.0);
      for (std::size_t i = 0; i + 1 < b.size(); i += 2) CHECK(b[i] < b[i + 1]);
      CHECK(b.back() <= -30.0 + 60.0 + 1e-9);
    }
  }
  CHECK(kind_of([] { gen_t4(0, 1); }) == ErrorKind::InvalidSize);
}

TEST_CASE("t4 bounds grow across rules") {
  const auto p = prepare(gen_t4(6, 21));
  const auto pairs = between_bounds(p.rules, false);
  // each pair of rules repeats its bounds; upper bounds chain into the next lower bound
  for (std::size_t r = 0; r + 4 < pairs.size(); r += 4) {
    CHECK(pairs[r] == pairs[r + 2]);
    CHECK(pairs[r + 1] == pairs[r + 4]);
    CHECK(pairs[r + 1] - pairs[r] <= 10.0 + 1e-9);
  }
  const auto singles = between_bounds(p.rules, true);
  for (std::size_t i = 1; i + 1 < singles.size(); i += 2) CHECK(singles[i] == singles[i + 1]);
}

TEST_CASE("t5 is the blood-pressure program") {
  CHECK(prepare(gen_t5(4)) == prepare(kExample2));
  const auto one = prepare(gen_t5(1));
  CHECK(one.facts.size() == 2);
  CHECK(one.continuous.size() == 2);
  CHECK(kind_of([] { gen_t5(0); }) == ErrorKind::InvalidSize);
  CHECK(bench_query("t5") == "high_number_strokes");
  CHECK(bench_query("t2") == "q0");
}

TEST_CASE("generated worlds are all satisfiable") {
  const std::vector<std::string> programs{gen_t1(2), gen_t1(4), gen_t1(6), gen_t2(2, 3), gen_t2(5, 2),
                                          gen_t3(2, 3), gen_t3(1, 4), gen_t5(1), gen_t5(2)};
  for (const auto& text : programs) {
    const auto p = prepare(text);
    const std::string query = text.find("high_number_strokes") != std::string::npos ? "high_number_strokes" : "q0";
    const auto r = solve_hybrid(p, parse_conjunction(query), {});
    CHECK_MESSAGE(r.inconsistent == 0.0, text);
  }
}
