#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hpasp/error.hpp"
#include "hpasp/grounder.hpp"
#include "hpasp/parser.hpp"

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

std::vector<std::string> rule_strings(const HybridProgram& p) {
  std::vector<std::string> out;
  for (const auto& r : p.rules) out.push_back(to_string(r));
  return out;
}

const char* kBloodPressure = R"(0.4::pred_d(1..4).
0.6::pred_s(1..4).
d(1..4):gamma(70,1).
s(1..4):gamma(120,1).

prob_d(P):- outside(d(P), 60, 80).
prob_s(P):- outside(s(P), 110, 130).

prob(P):- prob_d(P), pred_d(P).
prob(P):- prob_s(P), pred_s(P).

stroke(P);not_stroke(P):- prob(P).

:- #count{X:prob(X)}=P,
   #count{X:stroke(X),prob(X)}=S,
   10*S < 4*P.

high_number_strokes:-
   #count{X : stroke(X)}=CS, CS > 1.
)";

} // namespace

TEST_CASE("probabilistic facts, declarations and rules") {
  const auto p = parse_program("0.3::a. 0.4::b.\nq0 ; q1:- a. q0:- b.");
  REQUIRE(p.facts.size() == 2);
  CHECK(p.facts[0].prob == 0.3);
  CHECK(to_string(p.facts[1].atom) == "b");
  REQUIRE(p.rules.size() == 2);
  CHECK(p.rules[0].head.size() == 2);
  CHECK(p.continuous.empty());
}

TEST_CASE("continuous declarations") {
  const auto p = parse_program("0.4::b. a:gaussian(0,1). c:gamma(70,1). n:normal(1,2).");
  REQUIRE(p.continuous.size() == 3);
  CHECK(p.continuous[0].dist.family() == DistributionSpec::Family::Gaussian);
  CHECK(p.continuous[1].dist.shape() == 70.0);
  CHECK(p.continuous[2].dist.mean() == 1.0);
}

TEST_CASE("comparison predicates in bodies") {
  const auto p = parse_program("a:gaussian(0,1). q :- below(a,0.5). r :- between(a,0,1), not q. s :- outside(a,-1,1). t :- above(a, 2).");
  REQUIRE(p.rules.size() == 4);
  const auto& c = std::get<ComparisonAtom>(p.rules[1].body[0]);
  CHECK(c.kind == ComparisonAtom::Kind::Between);
  CHECK(c.value(0) == 0.0);
  CHECK(c.value(1) == 1.0);
  CHECK(std::get<ComparisonAtom>(p.rules[2].body[0]).kind == ComparisonAtom::Kind::Outside);
}

TEST_CASE("choice rules, constraints and aggregates") {
  const auto p = parse_program("{b(0)}. b(1). v(A) :- #count{X:b(X)}=A. :- a, not b(1). :- .");
  REQUIRE(p.rules.size() == 5);
  CHECK(p.rules[0].choice);
  CHECK(p.rules[3].head.empty());
  CHECK(p.rules[4].body.empty());
  const auto& agg = std::get<AggregateAtom>(p.rules[2].body[0]);
  CHECK(agg.op == CmpOp::Eq);
  CHECK(agg.elements.size() == 1);
  const auto q = parse_program("x :- 2 < #count{X:b(X)}.");
  CHECK(std::get<AggregateAtom>(q.rules[0].body[0]).op == CmpOp::Gt);
  const auto c = parse_program("{a;b} :- c.");
  CHECK(c.rules.size() == 2);
}

TEST_CASE("comments and whitespace") {
  const auto p = parse_program("% a comment\n0.5::a. % trailing\n\n  q :- a.\n");
  CHECK(p.facts.size() == 1);
  CHECK(p.rules.size() == 1);
}

TEST_CASE("syntax errors carry locations") {
  try {
    parse_program("a :- b.\nq :- c,, d.");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Syntax);
    CHECK(e.location().line == 2);
  }
  CHECK(kind_of([] { parse_program("a :- b"); }) == ErrorKind::Syntax);
  CHECK(kind_of([] { parse_program("1.5::a."); }) == ErrorKind::InvalidParameter);
  CHECK(kind_of([] { parse_program("-0.1::a."); }) != ErrorKind::InvalidArgument);
  CHECK(kind_of([] { parse_program("a:gaussian(0,-1)."); }) == ErrorKind::InvalidParameter);
  CHECK(kind_of([] { parse_program("a:uniform(0,1)."); }) == ErrorKind::Syntax);
  CHECK(kind_of([] { parse_program("__x :- a."); }) == ErrorKind::Syntax);
  CHECK(kind_of([] { parse_program("below(a,1) :- b."); }) == ErrorKind::Syntax);
}

TEST_CASE("duplicate declarations") {
  CHECK(kind_of([] { parse_program("0.5::a. 0.3::a."); }) == ErrorKind::DuplicateDeclaration);
  CHECK(kind_of([] { parse_program("a:gaussian(0,1). a:gamma(1,1)."); }) == ErrorKind::DuplicateDeclaration);
  CHECK(kind_of([] { prepare("0.5::p(1..3). 0.2::p(2)."); }) == ErrorKind::DuplicateDeclaration);
}

TEST_CASE("range expansion") {
  const auto p = expand_ranges(parse_program("0.4::pred_d(1..4). d(1..2):gamma(70,1). f(1..3)."));
  CHECK(p.facts.size() == 4);
  CHECK(to_string(p.facts[3].atom) == "pred_d(4)");
  CHECK(p.continuous.size() == 2);
  CHECK(p.rules.size() == 3);
  CHECK(kind_of([] { expand_ranges(parse_program("0.4::p(3..1).")); }) == ErrorKind::InvalidRange);
  CHECK(kind_of([] { prepare("q :- p(1..2)."); }) == ErrorKind::InvalidRange);
}

TEST_CASE("grounding of the blood-pressure program") {
  const auto p = prepare(kBloodPressure);
  CHECK(p.facts.size() == 8);
  CHECK(p.continuous.size() == 8);
  const auto rules = rule_strings(p);
  auto has = [&](const std::string& s) { return std::find(rules.begin(), rules.end(), s) != rules.end(); };
  CHECK(has("prob_d(3) :- outside(d(3),60,80)."));
  CHECK(has("prob(2) :- prob_s(2), pred_s(2)."));
  CHECK(has("stroke(4) ; not_stroke(4) :- prob(4)."));
  for (const auto& r : p.rules) {
    for (const auto& e : r.body) CHECK_FALSE(std::holds_alternative<LinearComparison>(e));
  }
  // Constraint instances: 10*S < 4*P keeps exactly the pairs with S < 0.4 P.
  std::size_t constraints = 0;
  for (const auto& r : p.rules) constraints += r.head.empty() ? 1 : 0;
  std::size_t expected = 0;
  for (int pp = 0; pp <= 4; ++pp) {
    for (int s = 0; s <= 4; ++s) expected += 10 * s < 4 * pp ? 1 : 0;
  }
  CHECK(constraints == expected);
}

TEST_CASE("grounding is idempotent and printing round-trips") {
  const auto p = prepare(kBloodPressure);
  CHECK(ground(p) == p);
  ParseOptions o;
  o.allow_reserved = true;
  const auto text = to_string(p);
  CHECK(parse_program(text, o) == p);
  const auto q = prepare("0.3::a. 0.4::b.\nq0 ; q1:- a. q0:- b. {c} :- a. :- c, not b.");
  CHECK(parse_program(to_string(q)) == q);
}

TEST_CASE("joins bind variables through positive literals") {
  const auto p = prepare("n(1..3). e(1,2). e(2,3). r(X,Y) :- e(X,Y). r(X,Z) :- r(X,Y), e(Y,Z). big(X) :- n(X), X > 1.");
  const auto rules = rule_strings(p);
  auto has = [&](const std::string& s) { return std::find(rules.begin(), rules.end(), s) != rules.end(); };
  CHECK(has("r(1,3) :- r(1,2), e(2,3)."));
  CHECK(has("big(3) :- n(3)."));
  CHECK_FALSE(has("big(1) :- n(1)."));
}

TEST_CASE("validation") {
  CHECK(kind_of([] { prepare("0.5::a. a :- b."); }) == ErrorKind::HeadViolation);
  CHECK(kind_of([] { prepare("x:gaussian(0,1). x :- b."); }) == ErrorKind::HeadViolation);
  CHECK(kind_of([] { prepare("x:gaussian(0,1). q :- x."); }) == ErrorKind::IllegalComparison);
  CHECK(kind_of([] { prepare("x:gaussian(0,1). q :- between(x,2,1)."); }) == ErrorKind::IllegalComparison);
  CHECK(kind_of([] { prepare("q :- below(y,1)."); }) == ErrorKind::UnknownContinuousVariable);
  CHECK(kind_of([] { prepare("q(X) :- not r(X)."); }) == ErrorKind::UnsafeRule);
  CHECK(kind_of([] { prepare("q(X) :- r."); }) == ErrorKind::UnsafeRule);
}

TEST_CASE("query conjunctions") {
  const auto c = parse_conjunction("b, not c, above(a,0.6)");
  REQUIRE(c.size() == 3);
  CHECK(std::get<Literal>(c[1]).negated);
  CHECK(std::holds_alternative<ComparisonAtom>(c[2]));
  CHECK(to_string(parse_atom("prob(3)")) == "prob(3)");
}
