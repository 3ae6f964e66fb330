#include "hpasp/grounder.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace hpasp {

namespace {

using Binding = std::map<std::string, Term>;

bool has_variables(const Term& t) {
  if (t.kind == Term::Kind::Variable) return true;
  for (const auto& a : t.args) {
    if (has_variables(a)) return true;
  }
  return false;
}

bool has_variables(const Atom& a) {
  for (const auto& t : a.args) {
    if (has_variables(t)) return true;
  }
  return false;
}

Term substitute(const Term& t, const Binding& b) {
  if (t.kind == Term::Kind::Variable) {
    auto it = b.find(t.name);
    return it == b.end() ? t : it->second;
  }
  if (t.args.empty()) return t;
  Term out = t;
  for (auto& a : out.args) a = substitute(a, b);
  if (out.kind == Term::Kind::Binary && !has_variables(out)) return evaluate_term(out);
  return out;
}

Atom substitute(const Atom& a, const Binding& b) {
  Atom out{a.predicate, {}};
  out.args.reserve(a.args.size());
  for (const auto& t : a.args) out.args.push_back(substitute(t, b));
  return out;
}

// Unifies a pattern with a ground term, extending the binding.
bool match(const Term& pattern, const Term& ground_term, Binding& b) {
  switch (pattern.kind) {
  case Term::Kind::Variable: {
    auto it = b.find(pattern.name);
    if (it != b.end()) return it->second == ground_term;
    b.emplace(pattern.name, ground_term);
    return true;
  }
  case Term::Kind::Function:
    if (ground_term.kind != Term::Kind::Function || ground_term.name != pattern.name ||
        ground_term.args.size() != pattern.args.size()) {
      return false;
    }
    for (std::size_t i = 0; i < pattern.args.size(); ++i) {
      if (!match(pattern.args[i], ground_term.args[i], b)) return false;
    }
    return true;
  case Term::Kind::Binary: {
    const Term v = substitute(pattern, b);
    if (has_variables(v)) return false;
    return v == ground_term;
  }
  default: return pattern == ground_term;
  }
}

bool match(const Atom& pattern, const Atom& ground_atom, Binding& b) {
  if (pattern.predicate != ground_atom.predicate || pattern.args.size() != ground_atom.args.size()) {
    return false;
  }
  for (std::size_t i = 0; i < pattern.args.size(); ++i) {
    if (!match(pattern.args[i], ground_atom.args[i], b)) return false;
  }
  return true;
}

std::string signature(const Atom& a) { return a.predicate + "/" + std::to_string(a.args.size()); }

class AtomIndex {
public:
  bool add(const Atom& a) {
    if (!keys_.insert(to_string(a)).second) return false;
    by_sig_[signature(a)].push_back(a);
    return true;
  }
  bool contains(const Atom& a) const { return keys_.count(to_string(a)) > 0; }
  const std::vector<Atom>& candidates(const Atom& pattern) const {
    static const std::vector<Atom> none;
    auto it = by_sig_.find(signature(pattern));
    return it == by_sig_.end() ? none : it->second;
  }
  std::size_t size() const { return keys_.size(); }

private:
  std::unordered_set<std::string> keys_;
  std::unordered_map<std::string, std::vector<Atom>> by_sig_;
};

bool numeric_compare(const Term& lhs, CmpOp op, const Term& rhs, Location loc) {
  if (lhs.kind == Term::Kind::Integer && rhs.kind == Term::Kind::Integer) {
    return compare(lhs.integer, op, rhs.integer);
  }
  if (lhs.is_numeric() && rhs.is_numeric()) {
    const double l = lhs.numeric_value();
    const double r = rhs.numeric_value();
    switch (op) {
    case CmpOp::Lt: return l < r;
    case CmpOp::Le: return l <= r;
    case CmpOp::Gt: return l > r;
    case CmpOp::Ge: return l >= r;
    case CmpOp::Eq: return l == r;
    case CmpOp::Ne: return l != r;
    }
  }
  if (op == CmpOp::Eq) return lhs == rhs;
  if (op == CmpOp::Ne) return !(lhs == rhs);
  throw Error(ErrorKind::IllegalComparison,
              "cannot order non-numeric terms " + to_string(lhs) + " and " + to_string(rhs), loc);
}

void collect_vars(const BodyElement& e, std::vector<std::string>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Literal>) {
          x.atom.collect_variables(out);
        } else if constexpr (std::is_same_v<T, ComparisonAtom>) {
          x.variable.collect_variables(out);
          for (const auto& t : x.bounds) t.collect_variables(out);
        } else if constexpr (std::is_same_v<T, AggregateAtom>) {
          // element-local variables are not global; only the guard counts
          x.bound.collect_variables(out);
        } else {
          x.lhs.collect_variables(out);
          x.rhs.collect_variables(out);
        }
      },
      e);
}

// Every variable must occur in a positive literal, in the variable argument
// of a comparison atom, or as a lone `= V` aggregate guard.
void check_safety(const Rule& r) {
  std::vector<std::string> bound;
  std::vector<std::string> used;
  for (const auto& e : r.body) {
    if (const auto* l = std::get_if<Literal>(&e)) {
      l->atom.collect_variables(l->negated ? used : bound);
    } else if (const auto* c = std::get_if<ComparisonAtom>(&e)) {
      c->variable.collect_variables(bound);
      for (const auto& t : c->bounds) t.collect_variables(used);
    } else if (const auto* a = std::get_if<AggregateAtom>(&e)) {
      a->bound.collect_variables(a->op == CmpOp::Eq && a->bound.kind == Term::Kind::Variable ? bound : used);
    } else {
      collect_vars(e, used);
    }
  }
  for (const auto& h : r.head) h.collect_variables(used);
  for (const auto& v : used) {
    if (v != "_" && std::find(bound.begin(), bound.end(), v) == bound.end()) {
      throw Error(ErrorKind::UnsafeRule, "variable " + v + " is not bound by a positive body literal in " + to_string(r),
                  r.loc);
    }
  }
}

bool rule_is_ground(const Rule& r) {
  for (const auto& h : r.head) {
    if (has_variables(h)) return false;
  }
  for (const auto& e : r.body) {
    std::vector<std::string> vars;
    collect_vars(e, vars);
    if (!vars.empty()) return false;
    if (const auto* agg = std::get_if<AggregateAtom>(&e)) {
      for (const auto& el : agg->elements) {
        for (const auto& t : el.tuple) {
          if (has_variables(t)) return false;
        }
        for (const auto& l : el.condition) {
          if (has_variables(l.atom)) return false;
        }
      }
    }
  }
  return true;
}

class Grounder {
public:
  explicit Grounder(const HybridProgram& p) : prog_(p) {
    for (const auto& c : p.continuous) {
      continuous_.push_back(c.atom);
      continuous_keys_.insert(to_string(c.atom));
    }
  }

  HybridProgram run() {
    for (const auto& f : prog_.facts) possible_.add(f.atom);
    std::vector<Rule> rules;
    // Iterate until no new head atom appears.
    for (;;) {
      const std::size_t before = possible_.size();
      rules.clear();
      seen_.clear();
      for (const auto& r : prog_.rules) ground_rule(r, rules);
      if (possible_.size() == before) break;
    }
    HybridProgram out;
    out.facts = prog_.facts;
    out.continuous = prog_.continuous;
    out.rules = std::move(rules);
    return out;
  }

private:
  void emit(Rule r, std::vector<Rule>& out) {
    if (!seen_.insert(to_string(r)).second) return;
    for (const auto& h : r.head) possible_.add(h);
    out.push_back(std::move(r));
  }

  void ground_rule(const Rule& r, std::vector<Rule>& out) {
    if (rule_is_ground(r)) {
      Binding empty;
      finish(r, empty, out);
      return;
    }
    // Comparison atoms written ground must name a declared variable.
    for (const auto& e : r.body) {
      if (const auto* c = std::get_if<ComparisonAtom>(&e)) {
        if (!has_variables(c->variable) && !continuous_keys_.count(to_string(c->variable))) {
          throw Error(ErrorKind::UnknownContinuousVariable,
                      to_string(c->variable) + " is not a declared continuous variable", r.loc);
        }
      }
    }
    std::vector<const BodyElement*> binders;
    for (const auto& e : r.body) {
      if (const auto* l = std::get_if<Literal>(&e); l && !l->negated) binders.push_back(&e);
    }
    for (const auto& e : r.body) {
      if (std::holds_alternative<ComparisonAtom>(e)) binders.push_back(&e);
    }
    for (const auto& e : r.body) {
      if (const auto* a = std::get_if<AggregateAtom>(&e);
          a && a->op == CmpOp::Eq && a->bound.kind == Term::Kind::Variable) {
        binders.push_back(&e);
      }
    }
    Binding b;
    join(r, binders, 0, b, out);
  }

  void join(const Rule& r, const std::vector<const BodyElement*>& binders, std::size_t i, Binding& b,
            std::vector<Rule>& out) {
    if (i == binders.size()) {
      finish(r, b, out);
      return;
    }
    const BodyElement& e = *binders[i];
    if (const auto* l = std::get_if<Literal>(&e)) {
      const Atom pattern = substitute(l->atom, b);
      if (!has_variables(pattern)) {
        if (possible_.contains(pattern)) join(r, binders, i + 1, b, out);
        return;
      }
      const auto candidates = possible_.candidates(pattern);
      for (const auto& g : candidates) {
        Binding next = b;
        if (match(pattern, g, next)) join(r, binders, i + 1, next, out);
      }
      return;
    }
    if (const auto* c = std::get_if<ComparisonAtom>(&e)) {
      const Atom pattern = substitute(c->variable, b);
      if (!has_variables(pattern)) {
        // ground through other literals: drop the instance if undeclared
        if (continuous_keys_.count(to_string(pattern))) join(r, binders, i + 1, b, out);
        return;
      }
      for (const auto& g : continuous_) {
        Binding next = b;
        if (match(pattern, g, next)) join(r, binders, i + 1, next, out);
      }
      return;
    }
    const auto& agg = std::get<AggregateAtom>(e);
    if (b.count(agg.bound.name)) {
      join(r, binders, i + 1, b, out);
      return;
    }
    const auto elements = ground_elements(agg, b, r.loc);
    std::set<std::string> tuples;
    for (const auto& el : elements) tuples.insert(tuple_key(el.tuple));
    for (std::int64_t v = 0; v <= static_cast<std::int64_t>(tuples.size()); ++v) {
      Binding next = b;
      next.emplace(agg.bound.name, Term::number(v));
      join(r, binders, i + 1, next, out);
    }
  }

  static std::string tuple_key(const std::vector<Term>& tuple) {
    std::string k;
    for (const auto& t : tuple) k += to_string(t) + ",";
    return k;
  }

  std::vector<AggregateElement> ground_elements(const AggregateAtom& agg, const Binding& b, Location loc) {
    std::vector<AggregateElement> out;
    std::set<std::string> seen;
    for (const auto& el : agg.elements) {
      std::vector<const Literal*> positive;
      for (const auto& l : el.condition) {
        if (!l.negated) positive.push_back(&l);
      }
      Binding local = b;
      ground_element(el, positive, 0, local, loc, out, seen);
    }
    return out;
  }

  void ground_element(const AggregateElement& el, const std::vector<const Literal*>& positive,
                      std::size_t i, Binding& b, Location loc, std::vector<AggregateElement>& out,
                      std::set<std::string>& seen) {
    if (i == positive.size()) {
      AggregateElement g;
      for (const auto& t : el.tuple) {
        g.tuple.push_back(substitute(t, b));
        if (has_variables(g.tuple.back())) {
          throw Error(ErrorKind::UnsafeRule, "unbound variable in aggregate tuple " + to_string(t), loc);
        }
      }
      for (const auto& l : el.condition) {
        Literal gl{substitute(l.atom, b), l.negated};
        if (has_variables(gl.atom)) {
          throw Error(ErrorKind::UnsafeRule, "unbound variable in aggregate condition " + to_string(l), loc);
        }
        g.condition.push_back(std::move(gl));
      }
      std::string key = tuple_key(g.tuple) + ":";
      for (const auto& l : g.condition) key += to_string(l) + ",";
      if (seen.insert(key).second) out.push_back(std::move(g));
      return;
    }
    const Atom pattern = substitute(positive[i]->atom, b);
    if (!has_variables(pattern)) {
      if (possible_.contains(pattern)) ground_element(el, positive, i + 1, b, loc, out, seen);
      return;
    }
    const auto candidates = possible_.candidates(pattern);
    for (const auto& g : candidates) {
      Binding next = b;
      if (match(pattern, g, next)) ground_element(el, positive, i + 1, next, loc, out, seen);
    }
  }

  void finish(const Rule& r, const Binding& b, std::vector<Rule>& out) {
    Rule g;
    g.choice = r.choice;
    g.loc = r.loc;
    for (const auto& h : r.head) {
      g.head.push_back(substitute(h, b));
      if (has_variables(g.head.back())) {
        throw Error(ErrorKind::UnsafeRule, "unbound variable in head " + to_string(h), r.loc);
      }
    }
    for (const auto& e : r.body) {
      if (const auto* l = std::get_if<Literal>(&e)) {
        Literal gl{substitute(l->atom, b), l->negated};
        if (has_variables(gl.atom)) {
          throw Error(ErrorKind::UnsafeRule, "unbound variable in " + to_string(*l), r.loc);
        }
        g.body.emplace_back(std::move(gl));
      } else if (const auto* c = std::get_if<ComparisonAtom>(&e)) {
        ComparisonAtom gc{c->kind, substitute(c->variable, b), {}};
        for (const auto& t : c->bounds) gc.bounds.push_back(substitute(t, b));
        std::vector<std::string> vars;
        collect_vars(BodyElement{gc}, vars);
        if (!vars.empty()) {
          throw Error(ErrorKind::UnsafeRule, "unbound variable " + vars.front() + " in " + to_string(*c), r.loc);
        }
        g.body.emplace_back(std::move(gc));
      } else if (const auto* a = std::get_if<AggregateAtom>(&e)) {
        AggregateAtom ga;
        ga.op = a->op;
        ga.bound = substitute(a->bound, b);
        if (has_variables(ga.bound)) {
          throw Error(ErrorKind::UnsafeRule, "unbound aggregate guard " + to_string(a->bound), r.loc);
        }
        ga.elements = ground_elements(*a, b, r.loc);
        g.body.emplace_back(std::move(ga));
      } else {
        const auto& lc = std::get<LinearComparison>(e);
        const Term lhs = substitute(lc.lhs, b);
        const Term rhs = substitute(lc.rhs, b);
        if (has_variables(lhs) || has_variables(rhs)) {
          throw Error(ErrorKind::UnsafeRule, "unbound variable in " + to_string(lc), r.loc);
        }
        if (!numeric_compare(lhs, lc.op, rhs, r.loc)) return;
      }
    }
    emit(std::move(g), out);
  }

  const HybridProgram& prog_;
  std::vector<Atom> continuous_;
  std::unordered_set<std::string> continuous_keys_;
  AtomIndex possible_;
  std::unordered_set<std::string> seen_;
};

std::vector<std::vector<Term>> expand_args(const std::vector<Term>& args, Location loc) {
  std::vector<std::vector<Term>> out{{}};
  for (const auto& a : args) {
    std::vector<Term> choices;
    if (a.kind == Term::Kind::Range) {
      const Term lo = has_variables(a.args[0]) ? a.args[0] : evaluate_term(a.args[0]);
      const Term hi = has_variables(a.args[1]) ? a.args[1] : evaluate_term(a.args[1]);
      if (lo.kind != Term::Kind::Integer || hi.kind != Term::Kind::Integer) {
        throw Error(ErrorKind::InvalidRange, "range bounds must be integers: " + to_string(a), loc);
      }
      if (lo.integer > hi.integer) {
        throw Error(ErrorKind::InvalidRange, "empty range " + to_string(a), loc);
      }
      for (std::int64_t v = lo.integer; v <= hi.integer; ++v) choices.push_back(Term::number(v));
    } else {
      choices.push_back(a);
    }
    std::vector<std::vector<Term>> next;
    for (const auto& prefix : out) {
      for (const auto& c : choices) {
        auto row = prefix;
        row.push_back(c);
        next.push_back(std::move(row));
      }
    }
    out = std::move(next);
  }
  return out;
}

bool has_range(const Atom& a) {
  return std::any_of(a.args.begin(), a.args.end(), [](const Term& t) { return t.kind == Term::Kind::Range; });
}

void reject_range(const Atom& a, Location loc) {
  if (has_range(a)) {
    throw Error(ErrorKind::InvalidRange, "ranges are only allowed in declarations and facts: " + to_string(a), loc);
  }
}

void check_literal(const Literal& l, const std::unordered_set<std::string>& continuous, Location loc) {
  if (has_variables(l.atom)) throw Error(ErrorKind::UnsafeRule, "non-ground literal " + to_string(l), loc);
  if (continuous.count(to_string(l.atom))) {
    throw Error(ErrorKind::IllegalComparison,
                "continuous variable " + to_string(l.atom) + " may only appear inside comparison atoms", loc);
  }
}

} // namespace

Term evaluate_term(const Term& t) {
  if (t.kind == Term::Kind::Function) {
    Term out = t;
    for (auto& a : out.args) a = evaluate_term(a);
    return out;
  }
  if (t.kind != Term::Kind::Binary) return t;
  const Term l = evaluate_term(t.args[0]);
  const Term r = evaluate_term(t.args[1]);
  if (!l.is_numeric() || !r.is_numeric()) {
    throw Error(ErrorKind::IllegalComparison, "arithmetic over non-numeric term " + to_string(t));
  }
  if (l.kind == Term::Kind::Integer && r.kind == Term::Kind::Integer) {
    switch (t.op) {
    case '+': return Term::number(l.integer + r.integer);
    case '-': return Term::number(l.integer - r.integer);
    default: return Term::number(l.integer * r.integer);
    }
  }
  const double a = l.numeric_value();
  const double b = r.numeric_value();
  switch (t.op) {
  case '+': return Term::real_number(a + b);
  case '-': return Term::real_number(a - b);
  default: return Term::real_number(a * b);
  }
}

HybridProgram expand_ranges(const HybridProgram& p) {
  HybridProgram out;
  std::map<std::string, double> probs;
  std::map<std::string, DistributionSpec> dists;
  for (const auto& f : p.facts) {
    for (auto& args : expand_args(f.atom.args, f.loc)) {
      ProbFactDecl g{f.prob, Atom{f.atom.predicate, std::move(args)}, f.loc};
      g.atom.args = [&] {
        std::vector<Term> ev;
        for (const auto& t : g.atom.args) ev.push_back(has_variables(t) ? t : evaluate_term(t));
        return ev;
      }();
      const std::string key = to_string(g.atom);
      auto [it, fresh] = probs.emplace(key, g.prob);
      if (!fresh) {
        if (it->second != g.prob) {
          throw Error(ErrorKind::DuplicateDeclaration, key + " declared with two probabilities", f.loc);
        }
        continue;
      }
      out.facts.push_back(std::move(g));
    }
  }
  for (const auto& c : p.continuous) {
    for (auto& args : expand_args(c.atom.args, c.loc)) {
      ContinuousDecl g{Atom{c.atom.predicate, std::move(args)}, c.dist, c.loc};
      for (auto& t : g.atom.args) {
        if (!has_variables(t)) t = evaluate_term(t);
      }
      const std::string key = to_string(g.atom);
      if (probs.count(key)) {
        throw Error(ErrorKind::DuplicateDeclaration, key + " is already a probabilistic fact", c.loc);
      }
      auto [it, fresh] = dists.emplace(key, g.dist);
      if (!fresh) {
        if (!(it->second == g.dist)) {
          throw Error(ErrorKind::DuplicateDeclaration, key + " declared with two distributions", c.loc);
        }
        continue;
      }
      out.continuous.push_back(std::move(g));
    }
  }
  for (const auto& r : p.rules) {
    if (!r.choice && r.head.size() == 1 && r.body.empty() && has_range(r.head[0])) {
      for (auto& args : expand_args(r.head[0].args, r.loc)) {
        out.rules.push_back(Rule{{Atom{r.head[0].predicate, std::move(args)}}, false, {}, r.loc});
      }
      continue;
    }
    if (r.choice && r.head.size() == 1 && has_range(r.head[0])) {
      for (auto& args : expand_args(r.head[0].args, r.loc)) {
        out.rules.push_back(Rule{{Atom{r.head[0].predicate, std::move(args)}}, true, r.body, r.loc});
      }
      continue;
    }
    for (const auto& h : r.head) reject_range(h, r.loc);
    for (const auto& e : r.body) {
      if (const auto* l = std::get_if<Literal>(&e)) reject_range(l->atom, r.loc);
    }
    out.rules.push_back(r);
  }
  return out;
}

HybridProgram ground(const HybridProgram& p) {
  for (const auto& f : p.facts) {
    if (has_variables(f.atom) || has_range(f.atom)) {
      throw Error(ErrorKind::UnsafeRule, "probabilistic fact must be ground: " + to_string(f.atom), f.loc);
    }
  }
  for (const auto& c : p.continuous) {
    if (has_variables(c.atom) || has_range(c.atom)) {
      throw Error(ErrorKind::UnsafeRule, "continuous declaration must be ground: " + to_string(c.atom), c.loc);
    }
  }
  for (const auto& r : p.rules) check_safety(r);
  return Grounder(p).run();
}

const HybridProgram& validate(const HybridProgram& p) {
  std::unordered_set<std::string> facts;
  std::unordered_set<std::string> continuous;
  for (const auto& f : p.facts) facts.insert(to_string(f.atom));
  for (const auto& c : p.continuous) continuous.insert(to_string(c.atom));
  for (const auto& r : p.rules) {
    for (const auto& h : r.head) {
      const std::string key = to_string(h);
      if (has_variables(h)) throw Error(ErrorKind::UnsafeRule, "non-ground head " + key, r.loc);
      if (facts.count(key)) {
        throw Error(ErrorKind::HeadViolation, "probabilistic fact " + key + " appears in a head", r.loc);
      }
      if (continuous.count(key)) {
        throw Error(ErrorKind::HeadViolation, "continuous variable " + key + " appears in a head", r.loc);
      }
    }
    for (const auto& e : r.body) {
      if (const auto* l = std::get_if<Literal>(&e)) {
        check_literal(*l, continuous, r.loc);
      } else if (const auto* c = std::get_if<ComparisonAtom>(&e)) {
        const std::string var = to_string(c->variable);
        if (has_variables(c->variable)) throw Error(ErrorKind::UnsafeRule, "non-ground " + to_string(*c), r.loc);
        if (!continuous.count(var)) {
          throw Error(ErrorKind::UnknownContinuousVariable, var + " is not a declared continuous variable", r.loc);
        }
        for (const auto& t : c->bounds) {
          if (!t.is_numeric()) {
            throw Error(ErrorKind::IllegalComparison,
                        to_string(*c) + " must compare against numeric constants", r.loc);
          }
        }
        if (c->bounds.size() == 2 && !(c->value(0) < c->value(1))) {
          throw Error(ErrorKind::IllegalComparison, to_string(*c) + " needs lower < upper", r.loc);
        }
      } else if (const auto* a = std::get_if<AggregateAtom>(&e)) {
        if (a->bound.kind != Term::Kind::Integer) {
          throw Error(ErrorKind::UnsafeRule, "aggregate guard must be an integer: " + to_string(*a), r.loc);
        }
        for (const auto& el : a->elements) {
          for (const auto& l : el.condition) check_literal(l, continuous, r.loc);
        }
      } else {
        throw Error(ErrorKind::UnsafeRule, "unevaluated comparison " + to_string(e), r.loc);
      }
    }
  }
  return p;
}

HybridProgram prepare(std::string_view text, const ParseOptions& options) {
  HybridProgram p = ground(expand_ranges(parse_program(text, options)));
  validate(p);
  return p;
}

} // namespace hpasp
