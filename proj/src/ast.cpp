#include "hpasp/ast.hpp"

#include <ostream>

#include "hpasp/format.hpp"

namespace hpasp {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::Syntax: return "SyntaxError";
  case ErrorKind::DuplicateDeclaration: return "DuplicateDeclaration";
  case ErrorKind::InvalidRange: return "InvalidRange";
  case ErrorKind::UnsafeRule: return "UnsafeRule";
  case ErrorKind::UnknownContinuousVariable: return "UnknownContinuousVariable";
  case ErrorKind::HeadViolation: return "HeadViolation";
  case ErrorKind::IllegalComparison: return "IllegalComparison";
  case ErrorKind::RecursiveAggregate: return "RecursiveAggregate";
  case ErrorKind::InvalidParameter: return "InvalidParameter";
  case ErrorKind::InvalidInterval: return "InvalidInterval";
  case ErrorKind::DegeneratePartition: return "DegeneratePartition";
  case ErrorKind::BoundNotInPartition: return "BoundNotInPartition";
  case ErrorKind::EnumerationCapExceeded: return "EnumerationCapExceeded";
  case ErrorKind::WorldCapExceeded: return "WorldCapExceeded";
  case ErrorKind::AllWorldsInconsistent: return "AllWorldsInconsistent";
  case ErrorKind::UndefinedConditional: return "UndefinedConditional";
  case ErrorKind::InvalidTolerance: return "InvalidTolerance";
  case ErrorKind::InvalidSize: return "InvalidSize";
  case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

namespace {

std::string decorate(ErrorKind kind, const std::string& message, Location loc) {
  std::string out(to_string(kind));
  if (loc.line > 0) {
    out += " at line " + std::to_string(loc.line) + ", column " + std::to_string(loc.column);
  }
  return out + ": " + message;
}

} // namespace

Error::Error(ErrorKind kind, const std::string& message, Location loc)
    : std::runtime_error(decorate(kind, message, loc)), kind_(kind), loc_(loc) {}

Term Term::symbol(std::string name) {
  Term t;
  t.kind = Kind::Symbol;
  t.name = std::move(name);
  return t;
}

Term Term::number(std::int64_t value) {
  Term t;
  t.kind = Kind::Integer;
  t.integer = value;
  return t;
}

Term Term::real_number(double value) {
  Term t;
  t.kind = Kind::Real;
  t.real = value;
  return t;
}

Term Term::variable(std::string name) {
  Term t;
  t.kind = Kind::Variable;
  t.name = std::move(name);
  return t;
}

Term Term::function(std::string name, std::vector<Term> args) {
  Term t;
  t.kind = Kind::Function;
  t.name = std::move(name);
  t.args = std::move(args);
  return t;
}

Term Term::binary(char op, Term lhs, Term rhs) {
  Term t;
  t.kind = Kind::Binary;
  t.op = op;
  t.args.push_back(std::move(lhs));
  t.args.push_back(std::move(rhs));
  return t;
}

Term Term::range(Term lo, Term hi) {
  Term t;
  t.kind = Kind::Range;
  t.args.push_back(std::move(lo));
  t.args.push_back(std::move(hi));
  return t;
}

bool Term::is_ground() const {
  switch (kind) {
  case Kind::Variable: return false;
  case Kind::Binary:
  case Kind::Range: return false;
  case Kind::Function:
    for (const auto& a : args) {
      if (!a.is_ground()) return false;
    }
    return true;
  default: return true;
  }
}

void Term::collect_variables(std::vector<std::string>& out) const {
  if (kind == Kind::Variable) {
    out.push_back(name);
    return;
  }
  for (const auto& a : args) a.collect_variables(out);
}

bool Atom::is_ground() const {
  for (const auto& a : args) {
    if (!a.is_ground()) return false;
  }
  return true;
}

void Atom::collect_variables(std::vector<std::string>& out) const {
  for (const auto& a : args) a.collect_variables(out);
}

std::string_view to_string(CmpOp op) {
  switch (op) {
  case CmpOp::Lt: return "<";
  case CmpOp::Le: return "<=";
  case CmpOp::Gt: return ">";
  case CmpOp::Ge: return ">=";
  case CmpOp::Eq: return "=";
  case CmpOp::Ne: return "!=";
  }
  return "?";
}

CmpOp flip(CmpOp op) {
  switch (op) {
  case CmpOp::Lt: return CmpOp::Gt;
  case CmpOp::Le: return CmpOp::Ge;
  case CmpOp::Gt: return CmpOp::Lt;
  case CmpOp::Ge: return CmpOp::Le;
  default: return op;
  }
}

bool compare(std::int64_t lhs, CmpOp op, std::int64_t rhs) {
  switch (op) {
  case CmpOp::Lt: return lhs < rhs;
  case CmpOp::Le: return lhs <= rhs;
  case CmpOp::Gt: return lhs > rhs;
  case CmpOp::Ge: return lhs >= rhs;
  case CmpOp::Eq: return lhs == rhs;
  case CmpOp::Ne: return lhs != rhs;
  }
  return false;
}

std::string_view ComparisonAtom::predicate_name(Kind kind) {
  switch (kind) {
  case Kind::Below: return "below";
  case Kind::Above: return "above";
  case Kind::Between: return "between";
  case Kind::Outside: return "outside";
  }
  return "?";
}

std::optional<ComparisonAtom::Kind> ComparisonAtom::from_predicate(std::string_view name,
                                                                   std::size_t arity) {
  if (arity == 2 && name == "below") return Kind::Below;
  if (arity == 2 && name == "above") return Kind::Above;
  if (arity == 3 && name == "between") return Kind::Between;
  if (arity == 3 && name == "outside") return Kind::Outside;
  return std::nullopt;
}

namespace {

int precedence(char op) { return op == '*' ? 2 : 1; }

void print_term(std::string& out, const Term& t);

void print_operand(std::string& out, const Term& t, int parent, bool right_of_minus) {
  const bool wrap = t.kind == Term::Kind::Binary &&
                    (precedence(t.op) < parent || (right_of_minus && precedence(t.op) == parent));
  if (wrap) out += '(';
  print_term(out, t);
  if (wrap) out += ')';
}

void print_args(std::string& out, const std::vector<Term>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ',';
    print_term(out, args[i]);
  }
}

void print_term(std::string& out, const Term& t) {
  switch (t.kind) {
  case Term::Kind::Symbol:
  case Term::Kind::Variable: out += t.name; break;
  case Term::Kind::Integer: out += std::to_string(t.integer); break;
  case Term::Kind::Real: {
    const std::string text = format_real(t.real);
    out += text;
    // keep reals distinguishable from integers when read back
    if (text.find_first_of(".eEn") == std::string::npos) out += ".0";
    break;
  }
  case Term::Kind::Function:
    out += t.name;
    out += '(';
    print_args(out, t.args);
    out += ')';
    break;
  case Term::Kind::Binary:
    print_operand(out, t.args[0], precedence(t.op), false);
    out += t.op;
    print_operand(out, t.args[1], precedence(t.op), t.op == '-');
    break;
  case Term::Kind::Range:
    print_term(out, t.args[0]);
    out += "..";
    print_term(out, t.args[1]);
    break;
  }
}

void print_atom(std::string& out, const Atom& a) {
  out += a.predicate;
  if (!a.args.empty()) {
    out += '(';
    print_args(out, a.args);
    out += ')';
  }
}

void print_literal(std::string& out, const Literal& l) {
  if (l.negated) out += "not ";
  print_atom(out, l.atom);
}

} // namespace

std::string to_string(const Term& t) {
  std::string out;
  print_term(out, t);
  return out;
}

std::string to_string(const Atom& a) {
  std::string out;
  print_atom(out, a);
  return out;
}

std::string to_string(const Literal& l) {
  std::string out;
  print_literal(out, l);
  return out;
}

std::string to_string(const ComparisonAtom& c) {
  std::string out(ComparisonAtom::predicate_name(c.kind));
  out += '(';
  print_atom(out, c.variable);
  for (const auto& b : c.bounds) {
    out += ',';
    print_term(out, b);
  }
  out += ')';
  return out;
}

std::string to_string(const AggregateAtom& a) {
  std::string out = "#count{";
  for (std::size_t i = 0; i < a.elements.size(); ++i) {
    if (i) out += "; ";
    const auto& e = a.elements[i];
    print_args(out, e.tuple);
    if (!e.condition.empty()) {
      out += ':';
      for (std::size_t j = 0; j < e.condition.size(); ++j) {
        if (j) out += ',';
        print_literal(out, e.condition[j]);
      }
    }
  }
  out += "} ";
  out += to_string(a.op);
  out += ' ';
  print_term(out, a.bound);
  return out;
}

std::string to_string(const LinearComparison& c) {
  std::string out;
  print_term(out, c.lhs);
  out += ' ';
  out += to_string(c.op);
  out += ' ';
  print_term(out, c.rhs);
  return out;
}

std::string to_string(const BodyElement& b) {
  return std::visit([](const auto& x) { return to_string(x); }, b);
}

std::string to_string(const Rule& r) {
  std::string out;
  if (r.choice) out += '{';
  for (std::size_t i = 0; i < r.head.size(); ++i) {
    if (i) out += " ; ";
    print_atom(out, r.head[i]);
  }
  if (r.choice) out += '}';
  if (!r.body.empty()) {
    out += r.head.empty() && !r.choice ? ":- " : " :- ";
    for (std::size_t i = 0; i < r.body.size(); ++i) {
      if (i) out += ", ";
      out += to_string(r.body[i]);
    }
  } else if (r.head.empty() && !r.choice) {
    out += ":-";
  }
  out += '.';
  return out;
}

std::string to_string(const ProbFactDecl& f) {
  std::string out = format_real(f.prob);
  out += "::";
  print_atom(out, f.atom);
  out += '.';
  return out;
}

std::string to_string(const ContinuousDecl& c) {
  std::string out;
  print_atom(out, c.atom);
  out += ':';
  out += c.dist.to_string();
  out += '.';
  return out;
}

std::string to_string(const HybridProgram& p) {
  std::string out;
  for (const auto& f : p.facts) out += to_string(f) + '\n';
  for (const auto& c : p.continuous) out += to_string(c) + '\n';
  for (const auto& r : p.rules) out += to_string(r) + '\n';
  return out;
}

std::ostream& operator<<(std::ostream& os, const Atom& a) { return os << to_string(a); }
std::ostream& operator<<(std::ostream& os, const Rule& r) { return os << to_string(r); }
std::ostream& operator<<(std::ostream& os, const HybridProgram& p) { return os << to_string(p); }

} // namespace hpasp
