#include "hpasp/asp.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace hpasp {

namespace {

std::string tuple_key(const std::vector<Term>& tuple) {
  std::string k;
  for (const auto& t : tuple) {
    k += to_string(t);
    k += '\x1f';
  }
  return k;
}

Atom aux_atom(const Atom& a) { return Atom{"__not_" + a.predicate, a.args}; }

bool holds(CmpOp op, std::int64_t lo, std::int64_t hi, std::int64_t bound, bool want_true) {
  // want_true: op holds for every count in [lo, hi]; otherwise for none
  if (want_true) {
    switch (op) {
    case CmpOp::Eq: return lo == hi && lo == bound;
    case CmpOp::Ne: return bound < lo || bound > hi;
    case CmpOp::Lt: return hi < bound;
    case CmpOp::Le: return hi <= bound;
    case CmpOp::Gt: return lo > bound;
    case CmpOp::Ge: return lo >= bound;
    }
  }
  switch (op) {
  case CmpOp::Eq: return bound < lo || bound > hi;
  case CmpOp::Ne: return lo == hi && lo == bound;
  case CmpOp::Lt: return lo >= bound;
  case CmpOp::Le: return lo > bound;
  case CmpOp::Gt: return hi <= bound;
  case CmpOp::Ge: return hi < bound;
  }
  return false;
}

class SccFinder {
public:
  explicit SccFinder(const std::vector<std::vector<AtomId>>& edges)
      : edges_(edges), index_(edges.size(), -1), low_(edges.size(), 0), on_stack_(edges.size(), 0),
        comp_(edges.size(), -1) {
    for (std::size_t v = 0; v < edges.size(); ++v) {
      if (index_[v] < 0) visit(static_cast<AtomId>(v));
    }
  }
  int component(AtomId a) const { return comp_[a]; }

private:
  void visit(AtomId v) {
    index_[v] = low_[v] = counter_++;
    stack_.push_back(v);
    on_stack_[v] = 1;
    for (AtomId w : edges_[v]) {
      if (index_[w] < 0) {
        visit(w);
        low_[v] = std::min(low_[v], low_[w]);
      } else if (on_stack_[w]) {
        low_[v] = std::min(low_[v], index_[w]);
      }
    }
    if (low_[v] == index_[v]) {
      AtomId w;
      do {
        w = stack_.back();
        stack_.pop_back();
        on_stack_[w] = 0;
        comp_[w] = components_;
      } while (w != v);
      ++components_;
    }
  }

  const std::vector<std::vector<AtomId>>& edges_;
  std::vector<int> index_;
  std::vector<int> low_;
  std::vector<char> on_stack_;
  std::vector<int> comp_;
  std::vector<AtomId> stack_;
  int counter_ = 0;
  int components_ = 0;
};

void check_recursive_aggregates(const Program& p, const std::vector<Rule>& source) {
  std::vector<std::vector<AtomId>> edges(p.atom_count());
  auto condition_atoms = [&](std::uint32_t g) {
    std::vector<AtomId> out;
    for (const auto& tuple : p.aggregates[g].tuples) {
      for (const auto& alt : tuple) {
        for (const auto& l : alt) out.push_back(l.atom);
      }
    }
    return out;
  };
  for (const auto& r : p.rules) {
    for (AtomId h : r.head) {
      edges[h].insert(edges[h].end(), r.pos.begin(), r.pos.end());
      edges[h].insert(edges[h].end(), r.neg.begin(), r.neg.end());
      for (auto g : r.aggregates) {
        auto c = condition_atoms(g);
        edges[h].insert(edges[h].end(), c.begin(), c.end());
      }
    }
  }
  SccFinder scc(edges);
  for (std::size_t i = 0; i < p.rules.size(); ++i) {
    const auto& r = p.rules[i];
    for (auto g : r.aggregates) {
      for (AtomId c : condition_atoms(g)) {
        for (AtomId h : r.head) {
          if (scc.component(c) == scc.component(h)) {
            throw Error(ErrorKind::RecursiveAggregate,
                        "aggregate over " + p.name(c) + " depends on the head " + p.name(h), source[i].loc);
          }
        }
      }
    }
  }
}

bool body_true(const Rule& r, const Interpretation& i) {
  for (const auto& e : r.body) {
    if (const auto* l = std::get_if<Literal>(&e)) {
      if (i.count(to_string(l->atom)) == (l->negated ? 1u : 0u)) return false;
    } else if (const auto* a = std::get_if<AggregateAtom>(&e)) {
      if (a->bound.kind != Term::Kind::Integer) {
        throw Error(ErrorKind::InvalidArgument, "aggregate guard is not ground: " + to_string(*a), r.loc);
      }
      if (!compare(evaluate_aggregate(*a, i), a->op, a->bound.integer)) return false;
    } else {
      throw Error(ErrorKind::IllegalComparison, "rule is not a plain ground rule: " + to_string(r), r.loc);
    }
  }
  return true;
}

std::vector<AtomId> non_aux_atoms(const Program& p) {
  std::vector<AtomId> out;
  for (AtomId a = 0; a < p.atom_count(); ++a) {
    if (!p.is_aux(a)) out.push_back(a);
  }
  return out;
}

AnswerSetCollection collect(const Program& p, const std::vector<AtomId>& watched, const std::set<std::string>& masks) {
  AnswerSetCollection out;
  for (const auto& m : masks) {
    Interpretation s;
    for (std::size_t i = 0; i < watched.size(); ++i) {
      if (m[i] == '1') s.insert(p.name(watched[i]));
    }
    out.sets.push_back(std::move(s));
  }
  std::sort(out.sets.begin(), out.sets.end(), [](const Interpretation& a, const Interpretation& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  out.sets.erase(std::unique(out.sets.begin(), out.sets.end()), out.sets.end());
  return out;
}

// Plain DPLL over clauses of (negative vars, positive vars).
struct MiniClause {
  std::vector<int> neg;
  std::vector<int> pos;
};

bool dpll(const std::vector<MiniClause>& clauses, std::vector<std::int8_t>& assign) {
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& c : clauses) {
      int free_count = 0;
      int free_var = -1;
      bool free_positive = false;
      bool sat = false;
      for (int x : c.neg) {
        if (assign[x] == 0) {
          sat = true;
          break;
        }
        if (assign[x] < 0) {
          ++free_count;
          free_var = x;
          free_positive = false;
        }
      }
      if (!sat) {
        for (int x : c.pos) {
          if (assign[x] == 1) {
            sat = true;
            break;
          }
          if (assign[x] < 0) {
            ++free_count;
            free_var = x;
            free_positive = true;
          }
        }
      }
      if (sat) continue;
      if (free_count == 0) return false;
      if (free_count == 1) {
        assign[free_var] = free_positive ? 1 : 0;
        changed = true;
      }
    }
  }
  auto it = std::find(assign.begin(), assign.end(), static_cast<std::int8_t>(-1));
  if (it == assign.end()) return true;
  for (std::int8_t value : {std::int8_t{0}, std::int8_t{1}}) {
    auto next = assign;
    next[it - assign.begin()] = value;
    if (dpll(clauses, next)) {
      assign = std::move(next);
      return true;
    }
  }
  return false;
}

} // namespace

AtomId Program::intern(const Atom& a) {
  std::string key = to_string(a);
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  const auto id = static_cast<AtomId>(atoms_.size());
  atoms_.push_back(a);
  names_.push_back(key);
  aux_.push_back(0);
  index_.emplace(std::move(key), id);
  return id;
}

std::optional<AtomId> Program::find(const Atom& a) const { return find(to_string(a)); }

std::optional<AtomId> Program::find(const std::string& printed) const {
  auto it = index_.find(printed);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Program compile(const std::vector<Rule>& rules, const std::vector<Atom>& preset) {
  Program p;
  for (const auto& a : preset) p.intern(a);
  for (const auto& r : rules) {
    CompiledRule cr;
    for (const auto& h : r.head) cr.head.push_back(p.intern(h));
    if (r.choice) {
      if (r.head.size() != 1) {
        throw Error(ErrorKind::InvalidArgument, "choice rule needs exactly one head atom", r.loc);
      }
      const AtomId aux = p.intern(aux_atom(r.head[0]));
      p.mark_aux(aux);
      cr.head.push_back(aux);
    }
    for (const auto& e : r.body) {
      if (const auto* l = std::get_if<Literal>(&e)) {
        (l->negated ? cr.neg : cr.pos).push_back(p.intern(l->atom));
      } else if (const auto* a = std::get_if<AggregateAtom>(&e)) {
        if (a->bound.kind != Term::Kind::Integer) {
          throw Error(ErrorKind::InvalidArgument, "aggregate guard is not ground: " + to_string(*a), r.loc);
        }
        CompiledAggregate ca;
        ca.op = a->op;
        ca.bound = a->bound.integer;
        std::map<std::string, std::size_t> slot;
        for (const auto& el : a->elements) {
          auto [it, fresh] = slot.emplace(tuple_key(el.tuple), ca.tuples.size());
          if (fresh) ca.tuples.emplace_back();
          std::vector<CompiledLiteral> cond;
          for (const auto& l : el.condition) cond.push_back({p.intern(l.atom), l.negated});
          ca.tuples[it->second].push_back(std::move(cond));
        }
        cr.aggregates.push_back(static_cast<std::uint32_t>(p.aggregates.size()));
        p.aggregates.push_back(std::move(ca));
      } else {
        throw Error(ErrorKind::IllegalComparison, "rule still contains a comparison: " + to_string(r), r.loc);
      }
    }
    p.rules.push_back(std::move(cr));
  }
  check_recursive_aggregates(p, rules);
  return p;
}

std::vector<Rule> desugar_choice(const std::vector<Rule>& rules) {
  std::vector<Rule> out;
  for (const auto& r : rules) {
    if (!r.choice) {
      out.push_back(r);
      continue;
    }
    Rule d = r;
    d.choice = false;
    d.head.push_back(aux_atom(r.head.at(0)));
    out.push_back(std::move(d));
  }
  return out;
}

std::int64_t evaluate_aggregate(const AggregateAtom& agg, const Interpretation& i) {
  std::set<std::string> counted;
  for (const auto& el : agg.elements) {
    bool ok = true;
    for (const auto& l : el.condition) {
      if (i.count(to_string(l.atom)) == (l.negated ? 1u : 0u)) {
        ok = false;
        break;
      }
    }
    if (ok) counted.insert(tuple_key(el.tuple));
  }
  return static_cast<std::int64_t>(counted.size());
}

std::vector<Rule> reduct(const std::vector<Rule>& p, const Interpretation& i) {
  std::vector<Rule> out;
  for (const auto& r : desugar_choice(p)) {
    if (!body_true(r, i)) continue;
    Rule pr{r.head, false, {}, r.loc};
    for (const auto& e : r.body) {
      if (const auto* l = std::get_if<Literal>(&e); l && !l->negated) pr.body.push_back(e);
    }
    out.push_back(std::move(pr));
  }
  return out;
}

bool is_stable_model(const std::vector<Rule>& p, const Interpretation& i) {
  const Program prog = compile(p);
  std::vector<std::int8_t> values(prog.atom_count(), Solver::kFalse);
  for (const auto& name : i) {
    auto id = prog.find(name);
    if (!id || prog.is_aux(*id)) return false;
    values[*id] = Solver::kTrue;
  }
  Solver solver(prog);
  // fill in the fresh atoms of choice rules
  for (std::size_t r = 0; r < prog.rules.size(); ++r) {
    const auto& cr = prog.rules[r];
    if (cr.head.size() != 2 || !prog.is_aux(cr.head[1])) continue;
    if (values[cr.head[0]] == Solver::kTrue) continue;
    if (body_true(p[r], i)) values[cr.head[1]] = Solver::kTrue;
  }
  const std::vector<std::int8_t> fixed(prog.atom_count(), Solver::kUnknown);
  return solver.is_stable(values, fixed, {});
}

AnswerSetCollection answer_sets(const std::vector<Rule>& p, std::size_t cap) {
  const Program prog = compile(p);
  Solver solver(prog);
  const auto watched = non_aux_atoms(prog);
  const std::vector<std::int8_t> fixed(prog.atom_count(), Solver::kUnknown);
  return collect(prog, watched, solver.projected(fixed, {}, watched, cap));
}

AnswerSetCollection projected_answer_sets(const std::vector<Rule>& p, const std::vector<Atom>& atoms,
                                          std::size_t cap) {
  const Program prog = compile(p);
  Solver solver(prog);
  std::vector<AtomId> watched;
  Interpretation projection;
  for (const auto& a : atoms) {
    projection.insert(to_string(a));
    auto id = prog.find(a);
    if (id && !prog.is_aux(*id) && std::find(watched.begin(), watched.end(), *id) == watched.end()) {
      watched.push_back(*id);
    }
  }
  const std::vector<std::int8_t> fixed(prog.atom_count(), Solver::kUnknown);
  auto out = collect(prog, watched, solver.projected(fixed, {}, watched, cap));
  out.projected = true;
  out.projection = std::move(projection);
  return out;
}

std::vector<Rule> to_choice_program(const std::vector<ProbFactDecl>& facts, const std::vector<Rule>& rules) {
  std::vector<Rule> out;
  for (const auto& f : facts) out.push_back(Rule{{f.atom}, true, {}, f.loc});
  out.insert(out.end(), rules.begin(), rules.end());
  return out;
}

Solver::Solver(const Program& p) : prog_(p), rules_with_head_(p.atom_count()) {
  for (std::uint32_t r = 0; r < p.rules.size(); ++r) {
    for (AtomId h : p.rules[r].head) rules_with_head_[h].push_back(r);
  }
}

int Solver::literal_state(AtomId a, bool negated, const std::vector<std::int8_t>& v) const {
  if (v[a] == kUnknown) return kUnknown;
  return (v[a] == kTrue) != negated ? kTrue : kFalse;
}

int Solver::aggregate_state(std::uint32_t g, const std::vector<std::int8_t>& v) const {
  const auto& agg = prog_.aggregates[g];
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  for (const auto& tuple : agg.tuples) {
    bool certain = false;
    bool possible = false;
    for (const auto& alt : tuple) {
      int state = kTrue;
      for (const auto& l : alt) {
        const int s = literal_state(l.atom, l.negated, v);
        if (s == kFalse) {
          state = kFalse;
          break;
        }
        if (s == kUnknown) state = kUnknown;
      }
      if (state == kTrue) certain = true;
      if (state != kFalse) possible = true;
    }
    if (certain) ++lo;
    if (possible) ++hi;
  }
  if (holds(agg.op, lo, hi, agg.bound, true)) return kTrue;
  if (holds(agg.op, lo, hi, agg.bound, false)) return kFalse;
  return kUnknown;
}

bool Solver::propagate(std::vector<std::int8_t>& v) const {
  const std::size_t n = prog_.atom_count();
  std::vector<char> support(n);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t ri = 0; ri < prog_.rules.size(); ++ri) {
      if (!enabled(ri)) continue;
      const auto& r = prog_.rules[ri];
      bool body_false = false;
      int unknown = 0;
      bool agg_unknown = false;
      AtomId last = 0;
      bool last_neg = false;
      for (AtomId a : r.pos) {
        if (v[a] == kFalse) {
          body_false = true;
          break;
        }
        if (v[a] == kUnknown) {
          ++unknown;
          last = a;
          last_neg = false;
        }
      }
      if (body_false) continue;
      for (AtomId a : r.neg) {
        if (v[a] == kTrue) {
          body_false = true;
          break;
        }
        if (v[a] == kUnknown) {
          ++unknown;
          last = a;
          last_neg = true;
        }
      }
      if (body_false) continue;
      for (auto g : r.aggregates) {
        const int s = aggregate_state(g, v);
        if (s == kFalse) {
          body_false = true;
          break;
        }
        if (s == kUnknown) agg_unknown = true;
      }
      if (body_false) continue;
      int head_unknown = 0;
      AtomId head_last = 0;
      bool head_true = false;
      for (AtomId h : r.head) {
        if (v[h] == kTrue) {
          head_true = true;
          break;
        }
        if (v[h] == kUnknown) {
          ++head_unknown;
          head_last = h;
        }
      }
      if (head_true) continue;
      if (unknown == 0 && !agg_unknown) {
        if (head_unknown == 0) return false;
        if (head_unknown == 1) {
          v[head_last] = kTrue;
          changed = true;
        }
      } else if (head_unknown == 0 && unknown == 1 && !agg_unknown) {
        v[last] = last_neg ? kTrue : kFalse;
        changed = true;
      }
    }
    if (changed) continue;

    // Atoms outside the least fixpoint of the rules whose bodies may still
    // hold cannot be true in any stable model extending v.
    std::fill(support.begin(), support.end(), 0);
    for (std::size_t a = 0; a < n; ++a) {
      if (fixed_[a] == kTrue) support[a] = 1;
    }
    for (bool grew = true; grew;) {
      grew = false;
      for (std::size_t ri = 0; ri < prog_.rules.size(); ++ri) {
        if (!enabled(ri)) continue;
        const auto& r = prog_.rules[ri];
        bool all_in = std::all_of(r.pos.begin(), r.pos.end(), [&](AtomId a) { return support[a] && v[a] != kFalse; });
        bool head_open = std::any_of(r.head.begin(), r.head.end(), [&](AtomId h) { return !support[h] && v[h] != kFalse; });
        if (!all_in || !head_open) continue;
        if (std::any_of(r.neg.begin(), r.neg.end(), [&](AtomId a) { return v[a] == kTrue; })) continue;
        if (std::any_of(r.aggregates.begin(), r.aggregates.end(),
                        [&](std::uint32_t g) { return aggregate_state(g, v) == kFalse; })) {
          continue;
        }
        for (AtomId h : r.head) {
          if (!support[h] && v[h] != kFalse) {
            support[h] = 1;
            grew = true;
          }
        }
      }
    }
    for (std::size_t a = 0; a < n; ++a) {
      if (support[a] || fixed_[a] != kUnknown) continue;
      if (v[a] == kTrue) return false;
      if (v[a] == kUnknown) {
        v[a] = kFalse;
        changed = true;
      }
    }
  }
  return true;
}

bool Solver::minimal(const std::vector<std::int8_t>& v) const {
  std::vector<int> local(prog_.atom_count(), -1);
  int count = 0;
  for (std::size_t a = 0; a < v.size(); ++a) {
    if (v[a] == kTrue && fixed_[a] == kUnknown) local[a] = count++;
  }
  if (count == 0) return true;
  std::vector<MiniClause> clauses;
  bool horn = true;
  for (std::size_t ri = 0; ri < prog_.rules.size(); ++ri) {
    if (!enabled(ri)) continue;
    const auto& r = prog_.rules[ri];
    if (!std::all_of(r.pos.begin(), r.pos.end(), [&](AtomId a) { return v[a] == kTrue; })) continue;
    if (!std::all_of(r.neg.begin(), r.neg.end(), [&](AtomId a) { return v[a] == kFalse; })) continue;
    if (!std::all_of(r.aggregates.begin(), r.aggregates.end(),
                     [&](std::uint32_t g) { return aggregate_state(g, v) == kTrue; })) {
      continue;
    }
    MiniClause c;
    bool satisfied = false;
    for (AtomId h : r.head) {
      if (v[h] != kTrue) continue;
      if (local[h] < 0) {
        satisfied = true;
        break;
      }
      c.pos.push_back(local[h]);
    }
    if (satisfied) continue;
    for (AtomId a : r.pos) {
      if (local[a] >= 0) c.neg.push_back(local[a]);
    }
    if (c.pos.size() != 1) horn = false;
    clauses.push_back(std::move(c));
  }
  if (horn) {
    std::vector<char> in(count, 0);
    int size = 0;
    for (bool grew = true; grew;) {
      grew = false;
      for (const auto& c : clauses) {
        if (in[c.pos[0]]) continue;
        if (std::all_of(c.neg.begin(), c.neg.end(), [&](int x) { return in[x] != 0; })) {
          in[c.pos[0]] = 1;
          ++size;
          grew = true;
        }
      }
    }
    return size == count;
  }
  MiniClause proper;
  for (int x = 0; x < count; ++x) proper.neg.push_back(x);
  clauses.push_back(std::move(proper));
  std::vector<std::int8_t> assign(count, -1);
  return !dpll(clauses, assign);
}

bool Solver::exists(std::vector<std::int8_t> v) {
  if (!propagate(v)) return false;
  auto it = std::find(v.begin(), v.end(), static_cast<std::int8_t>(kUnknown));
  if (it == v.end()) return minimal(v);
  const auto a = static_cast<std::size_t>(it - v.begin());
  auto t = v;
  t[a] = kTrue;
  if (exists(std::move(t))) return true;
  v[a] = kFalse;
  return exists(std::move(v));
}

void Solver::search(std::vector<std::int8_t> v, const std::vector<AtomId>& watched, std::set<std::string>& out) {
  if (!propagate(v)) return;
  for (AtomId w : watched) {
    if (v[w] != kUnknown) continue;
    auto t = v;
    t[w] = kTrue;
    search(std::move(t), watched, out);
    v[w] = kFalse;
    search(std::move(v), watched, out);
    return;
  }
  std::string mask(watched.size(), '0');
  for (std::size_t i = 0; i < watched.size(); ++i) {
    if (v[watched[i]] == kTrue) mask[i] = '1';
  }
  if (out.count(mask)) return;
  if (exists(std::move(v))) out.insert(std::move(mask));
}

std::set<std::string> Solver::projected(const std::vector<std::int8_t>& fixed, const std::vector<char>& enabled,
                                        const std::vector<AtomId>& watched, std::size_t cap) {
  fixed_ = fixed;
  enabled_ = enabled;
  std::vector<std::int8_t> v = fixed;
  std::set<std::string> out;
  if (!propagate(v)) return out;
  const auto free_atoms = static_cast<std::size_t>(std::count(v.begin(), v.end(), static_cast<std::int8_t>(kUnknown)));
  if (free_atoms > cap) {
    throw Error(ErrorKind::EnumerationCapExceeded, std::to_string(free_atoms) +
                                                       " atoms remain undecided after propagation; the cap is " +
                                                       std::to_string(cap));
  }
  search(std::move(v), watched, out);
  return out;
}

bool Solver::is_stable(const std::vector<std::int8_t>& values, const std::vector<std::int8_t>& fixed,
                       const std::vector<char>& enabled) {
  fixed_ = fixed;
  enabled_ = enabled;
  if (std::find(values.begin(), values.end(), static_cast<std::int8_t>(kUnknown)) != values.end()) {
    throw Error(ErrorKind::InvalidArgument, "stability check needs a total assignment");
  }
  auto v = values;
  if (!propagate(v) || v != values) return false;
  return minimal(v);
}

} // namespace hpasp
