#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hpasp/distributions.hpp"
#include "hpasp/error.hpp"

namespace hpasp {

/// A term of the object language. Arithmetic and ranges are kept as trees
/// until grounding evaluates them; after grounding only Symbol, Integer,
/// Real and Function (with constant arguments) remain.
struct Term {
  enum class Kind : std::uint8_t { Symbol, Integer, Real, Variable, Function, Binary, Range };

  Kind kind = Kind::Integer;
  std::string name;
  std::int64_t integer = 0;
  double real = 0.0;
  char op = 0;
  std::vector<Term> args;

  static Term symbol(std::string name);
  static Term number(std::int64_t value);
  static Term real_number(double value);
  static Term variable(std::string name);
  static Term function(std::string name, std::vector<Term> args);
  static Term binary(char op, Term lhs, Term rhs);
  static Term range(Term lo, Term hi);

  bool is_ground() const;
  bool is_numeric() const { return kind == Kind::Integer || kind == Kind::Real; }
  double numeric_value() const { return kind == Kind::Integer ? static_cast<double>(integer) : real; }
  void collect_variables(std::vector<std::string>& out) const;

  bool operator==(const Term&) const = default;
};

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  bool is_ground() const;
  void collect_variables(std::vector<std::string>& out) const;
  bool operator==(const Atom&) const = default;
};

struct Literal {
  Atom atom;
  bool negated = false;

  bool operator==(const Literal&) const = default;
};

enum class CmpOp : std::uint8_t { Lt, Le, Gt, Ge, Eq, Ne };

std::string_view to_string(CmpOp op);
CmpOp flip(CmpOp op);
bool compare(std::int64_t lhs, CmpOp op, std::int64_t rhs);

/// below/above/between/outside over a continuous random variable.
struct ComparisonAtom {
  enum class Kind : std::uint8_t { Below, Above, Between, Outside };

  Kind kind = Kind::Below;
  Atom variable;
  std::vector<Term> bounds; // one for Below/Above, two for Between/Outside

  static std::string_view predicate_name(Kind kind);
  static std::optional<Kind> from_predicate(std::string_view name, std::size_t arity);

  double value(std::size_t i) const { return bounds.at(i).numeric_value(); }
  bool operator==(const ComparisonAtom&) const = default;
};

struct AggregateElement {
  std::vector<Term> tuple;
  std::vector<Literal> condition;

  bool operator==(const AggregateElement&) const = default;
};

/// `#count{elements} op bound`.
struct AggregateAtom {
  std::vector<AggregateElement> elements;
  CmpOp op = CmpOp::Eq;
  Term bound;

  bool operator==(const AggregateAtom&) const = default;
};

/// Integer comparison between two arithmetic terms, e.g. `10*S < 4*P`.
struct LinearComparison {
  Term lhs;
  CmpOp op = CmpOp::Lt;
  Term rhs;

  bool operator==(const LinearComparison&) const = default;
};

using BodyElement = std::variant<Literal, ComparisonAtom, AggregateAtom, LinearComparison>;

struct Rule {
  std::vector<Atom> head; // empty: constraint
  bool choice = false;
  std::vector<BodyElement> body;
  Location loc;

  bool is_fact() const { return !choice && head.size() == 1 && body.empty(); }
  bool operator==(const Rule& o) const { return head == o.head && choice == o.choice && body == o.body; }
};

struct ProbFactDecl {
  double prob = 0.0;
  Atom atom;
  Location loc;

  bool operator==(const ProbFactDecl& o) const { return prob == o.prob && atom == o.atom; }
};

struct ContinuousDecl {
  Atom atom;
  DistributionSpec dist = DistributionSpec::gaussian(0.0, 1.0);
  Location loc;

  bool operator==(const ContinuousDecl& o) const { return atom == o.atom && dist == o.dist; }
};

/// The (D, C, R) triple: discrete probabilistic facts, continuous variable
/// declarations and rules.
struct HybridProgram {
  std::vector<ProbFactDecl> facts;
  std::vector<ContinuousDecl> continuous;
  std::vector<Rule> rules;

  bool operator==(const HybridProgram&) const = default;
};

std::string to_string(const Term& t);
std::string to_string(const Atom& a);
std::string to_string(const Literal& l);
std::string to_string(const ComparisonAtom& c);
std::string to_string(const AggregateAtom& a);
std::string to_string(const LinearComparison& c);
std::string to_string(const BodyElement& b);
std::string to_string(const Rule& r);
std::string to_string(const ProbFactDecl& f);
std::string to_string(const ContinuousDecl& c);
/// One statement per line, in the concrete syntax accepted by the parser.
std::string to_string(const HybridProgram& p);

std::ostream& operator<<(std::ostream& os, const Atom& a);
std::ostream& operator<<(std::ostream& os, const Rule& r);
std::ostream& operator<<(std::ostream& os, const HybridProgram& p);

} // namespace hpasp
