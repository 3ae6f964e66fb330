#include "hpasp/discretizer.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "hpasp/format.hpp"

namespace hpasp {

namespace {

Term atom_as_term(const Atom& a) {
  if (a.args.empty()) return Term::symbol(a.predicate);
  return Term::function(a.predicate, a.args);
}

std::size_t find_bound(const IntervalPartition& part, double c) {
  auto it = std::lower_bound(part.bounds.begin(), part.bounds.end(), c);
  if (it == part.bounds.end() || *it != c) {
    throw Error(ErrorKind::BoundNotInPartition,
                format_real(c) + " is not a bound of the partition of " + to_string(part.variable));
  }
  return static_cast<std::size_t>(it - part.bounds.begin());
}

std::vector<Rule> split_outside(const Rule& r) {
  std::vector<Rule> out{Rule{r.head, r.choice, {}, r.loc}};
  for (const auto& e : r.body) {
    const auto* c = std::get_if<ComparisonAtom>(&e);
    if (c == nullptr || c->kind == ComparisonAtom::Kind::Below || c->kind == ComparisonAtom::Kind::Above) {
      for (auto& o : out) o.body.push_back(e);
      continue;
    }
    const ComparisonAtom above{ComparisonAtom::Kind::Above, c->variable,
                               {c->kind == ComparisonAtom::Kind::Between ? c->bounds[0] : c->bounds[1]}};
    const ComparisonAtom below{ComparisonAtom::Kind::Below, c->variable,
                               {c->kind == ComparisonAtom::Kind::Between ? c->bounds[1] : c->bounds[0]}};
    if (c->kind == ComparisonAtom::Kind::Between) {
      for (auto& o : out) {
        o.body.emplace_back(above);
        o.body.emplace_back(below);
      }
      continue;
    }
    std::vector<Rule> doubled;
    doubled.reserve(out.size() * 2);
    for (const auto& o : out) {
      doubled.push_back(o);
      doubled.back().body.emplace_back(above);
      doubled.push_back(o);
      doubled.back().body.emplace_back(below);
    }
    out = std::move(doubled);
  }
  return out;
}

const IntervalPartition& partition_of(const std::vector<IntervalPartition>& parts,
                                      const std::map<std::string, std::size_t>& index, const Atom& var) {
  auto it = index.find(to_string(var));
  if (it == index.end()) {
    throw Error(ErrorKind::UnknownContinuousVariable, to_string(var) + " has no partition");
  }
  return parts[it->second];
}

std::map<std::string, std::size_t> index_partitions(const std::vector<IntervalPartition>& parts) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < parts.size(); ++i) index.emplace(to_string(parts[i].variable), i);
  return index;
}

DiscretizedProgram discretize_impl(const HybridProgram& p, const std::vector<ComparisonAtom>& evidence) {
  DiscretizedProgram out;
  out.facts = p.facts;
  const std::vector<Rule> converted = convert_between_outside(p.rules);
  HybridProgram staged{p.facts, p.continuous, converted};
  out.partitions = compute_partitions(staged, evidence);

  std::vector<Rule> aux;
  for (std::size_t v = 0; v < p.continuous.size(); ++v) {
    const auto& decl = p.continuous[v];
    const auto& part = out.partitions[v];
    const auto probs = interval_fact_probabilities(decl.dist, part);
    for (std::size_t k = 1; k <= probs.size(); ++k) {
      Atom f = interval_fact_atom(decl.atom, k);
      out.facts.push_back(ProbFactDecl{probs[k - 1], f, decl.loc});
      out.provenance.facts.push_back(IntervalFact{std::move(f), decl.atom, k, probs[k - 1]});
    }
    for (std::size_t k = 1; k <= part.interval_count(); ++k) {
      out.provenance.heads.push_back(AuxHead{aux_head_atom(decl.atom, k), decl.atom, k});
    }
    for (auto& r : build_aux_clauses(decl.atom, part.interval_count())) aux.push_back(std::move(r));
  }

  out.rules = std::move(aux);
  for (auto& r : handle_comparison_atoms(converted, out.partitions)) out.rules.push_back(std::move(r));

  const auto index = index_partitions(out.partitions);
  for (std::size_t i = 0; i < evidence.size(); ++i) {
    const auto& part = partition_of(out.partitions, index, evidence[i].variable);
    const Atom ev = evidence_atom(i);
    for (std::size_t k : part.satisfying_intervals(evidence[i])) {
      out.rules.push_back(Rule{{ev}, false, {Literal{aux_head_atom(part.variable, k), false}}, {}});
    }
    out.evidence_atoms.push_back(ev);
  }
  return out;
}

} // namespace

std::vector<std::size_t> IntervalPartition::satisfying_intervals(const ComparisonAtom& c) const {
  const std::size_t m = interval_count();
  std::vector<std::size_t> out;
  auto below = [&](double x) {
    const std::size_t j = find_bound(*this, x);
    for (std::size_t k = 1; k <= j + 1; ++k) out.push_back(k);
  };
  auto above = [&](double x) {
    const std::size_t j = find_bound(*this, x);
    for (std::size_t k = j + 2; k <= m; ++k) out.push_back(k);
  };
  switch (c.kind) {
  case ComparisonAtom::Kind::Below: below(c.value(0)); break;
  case ComparisonAtom::Kind::Above: above(c.value(0)); break;
  case ComparisonAtom::Kind::Between: {
    const std::size_t lo = find_bound(*this, c.value(0));
    const std::size_t hi = find_bound(*this, c.value(1));
    for (std::size_t k = lo + 2; k <= hi + 1; ++k) out.push_back(k);
    break;
  }
  case ComparisonAtom::Kind::Outside:
    below(c.value(0));
    above(c.value(1));
    break;
  }
  return out;
}

DiscretizedProgram DiscretizedProgram::from_discrete(const HybridProgram& p) {
  if (!p.continuous.empty()) {
    throw Error(ErrorKind::InvalidArgument, "program has continuous variables; discretize it first");
  }
  DiscretizedProgram out;
  out.facts = p.facts;
  out.rules = p.rules;
  return out;
}

Atom interval_fact_atom(const Atom& variable, std::size_t k) {
  return Atom{"__int", {atom_as_term(variable), Term::number(static_cast<std::int64_t>(k))}};
}

Atom aux_head_atom(const Atom& variable, std::size_t k) {
  return Atom{"__h", {atom_as_term(variable), Term::number(static_cast<std::int64_t>(k))}};
}

Atom evidence_atom(std::size_t i) { return Atom{"__ev", {Term::number(static_cast<std::int64_t>(i))}}; }

std::vector<Rule> convert_between_outside(const std::vector<Rule>& rules) {
  std::vector<Rule> out;
  for (const auto& r : rules) {
    for (auto& s : split_outside(r)) out.push_back(std::move(s));
  }
  return out;
}

std::vector<IntervalPartition> compute_partitions(const HybridProgram& p,
                                                  const std::vector<ComparisonAtom>& evidence) {
  std::map<std::string, std::set<double>> constants;
  auto add = [&](const ComparisonAtom& c) {
    auto& s = constants[to_string(c.variable)];
    for (std::size_t i = 0; i < c.bounds.size(); ++i) s.insert(c.value(i));
  };
  for (const auto& r : p.rules) {
    for (const auto& e : r.body) {
      if (const auto* c = std::get_if<ComparisonAtom>(&e)) add(*c);
    }
  }
  for (const auto& c : evidence) add(c);
  std::vector<IntervalPartition> out;
  for (const auto& decl : p.continuous) {
    IntervalPartition part{decl.atom, {}};
    auto it = constants.find(to_string(decl.atom));
    if (it != constants.end()) part.bounds.assign(it->second.begin(), it->second.end());
    out.push_back(std::move(part));
  }
  return out;
}

std::vector<double> interval_fact_probabilities(const DistributionSpec& d, const IntervalPartition& partition) {
  std::vector<double> out;
  const std::size_t m = partition.interval_count();
  for (std::size_t k = 1; k < m; ++k) {
    const double lo = partition.lower(k);
    const double denom = d.sf(lo);
    if (!(denom > 0.0)) {
      throw Error(ErrorKind::DegeneratePartition, "no probability mass of " + to_string(partition.variable) +
                                                      " above " + format_real(lo));
    }
    const double pi = d.interval_mass(lo, partition.upper(k)) / denom;
    out.push_back(std::clamp(pi, 0.0, 1.0));
  }
  return out;
}

std::vector<Rule> build_aux_clauses(const Atom& variable, std::size_t m) {
  std::vector<Rule> out;
  for (std::size_t k = 1; k <= m; ++k) {
    Rule r{{aux_head_atom(variable, k)}, false, {}, {}};
    for (std::size_t j = 1; j < k; ++j) r.body.emplace_back(Literal{interval_fact_atom(variable, j), true});
    if (k < m) r.body.emplace_back(Literal{interval_fact_atom(variable, k), false});
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Rule> handle_comparison_atoms(const std::vector<Rule>& rules,
                                          const std::vector<IntervalPartition>& partitions) {
  const auto index = index_partitions(partitions);
  std::vector<Rule> out;
  for (const auto& r : rules) {
    // variable -> surviving intervals; slot -> variable whose aux head goes there
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::size_t>> allowed;
    std::map<std::string, const IntervalPartition*> part_of;
    std::vector<std::optional<std::string>> slot(r.body.size());
    bool dead = false;
    for (std::size_t i = 0; i < r.body.size(); ++i) {
      const auto* c = std::get_if<ComparisonAtom>(&r.body[i]);
      if (c == nullptr) continue;
      const std::string key = to_string(c->variable);
      const auto& part = partition_of(partitions, index, c->variable);
      auto ks = part.satisfying_intervals(*c);
      auto it = allowed.find(key);
      if (it == allowed.end()) {
        order.push_back(key);
        part_of[key] = &part;
        slot[i] = key;
        allowed.emplace(key, std::move(ks));
      } else {
        std::vector<std::size_t> both;
        std::set_intersection(it->second.begin(), it->second.end(), ks.begin(), ks.end(), std::back_inserter(both));
        it->second = std::move(both);
      }
    }
    for (const auto& k : order) dead = dead || allowed[k].empty();
    if (dead) continue;
    if (order.empty()) {
      out.push_back(r);
      continue;
    }
    std::map<std::string, std::size_t> choice;
    std::vector<std::size_t> pos(order.size(), 0);
    for (;;) {
      Rule copy{r.head, r.choice, {}, r.loc};
      for (std::size_t i = 0; i < r.body.size(); ++i) {
        if (slot[i]) {
          const std::size_t v = std::find(order.begin(), order.end(), *slot[i]) - order.begin();
          copy.body.emplace_back(Literal{aux_head_atom(part_of[*slot[i]]->variable, allowed[*slot[i]][pos[v]]), false});
        } else if (!std::holds_alternative<ComparisonAtom>(r.body[i])) {
          copy.body.push_back(r.body[i]);
        }
      }
      out.push_back(std::move(copy));
      // odometer, last variable fastest
      std::size_t v = order.size();
      while (v > 0) {
        --v;
        if (++pos[v] < allowed[order[v]].size()) break;
        pos[v] = 0;
        if (v == 0) {
          v = order.size() + 1;
          break;
        }
      }
      if (v == order.size() + 1) break;
    }
  }
  return out;
}

DiscretizedProgram discretize(const HybridProgram& p) { return discretize_impl(p, {}); }

DiscretizedProgram discretize_with_evidence(const HybridProgram& p, const std::vector<ComparisonAtom>& evidence) {
  return discretize_impl(p, evidence);
}

std::string to_string(const DiscretizedProgram& p) {
  std::string out;
  for (const auto& f : p.facts) out += to_string(f) + '\n';
  for (const auto& r : p.rules) out += to_string(r) + '\n';
  return out;
}

} // namespace hpasp
