#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hpasp/ast.hpp"

namespace hpasp {

/// Bounds b_2 < ... < b_m of a continuous variable; interval k (1-based) is
/// [b_k, b_{k+1}] with b_1 = -inf and b_{m+1} = +inf.
struct IntervalPartition {
  Atom variable;
  std::vector<double> bounds;

  std::size_t interval_count() const { return bounds.size() + 1; }
  double lower(std::size_t k) const { return k <= 1 ? kNegInf : bounds.at(k - 2); }
  double upper(std::size_t k) const { return k >= interval_count() ? kPosInf : bounds.at(k - 1); }
  /// 1-based intervals on which the comparison is true.
  std::vector<std::size_t> satisfying_intervals(const ComparisonAtom& c) const;
};

struct IntervalFact {
  Atom fact;     // __int(var, k)
  Atom variable;
  std::size_t interval = 0;
  double prob = 0.0;
};

struct AuxHead {
  Atom head;     // __h(var, k)
  Atom variable;
  std::size_t interval = 0;
};

struct FactProvenance {
  std::vector<IntervalFact> facts;
  std::vector<AuxHead> heads;
};

struct DiscretizedProgram {
  std::vector<ProbFactDecl> facts; // original D first, then the interval facts
  std::vector<Rule> rules;
  FactProvenance provenance;
  std::vector<IntervalPartition> partitions;
  /// One indicator atom per continuous evidence comparison (`__ev(i)`),
  /// true exactly when the comparison holds.
  std::vector<Atom> evidence_atoms;

  /// Wraps a program without continuous variables.
  static DiscretizedProgram from_discrete(const HybridProgram& p);
};

Atom interval_fact_atom(const Atom& variable, std::size_t k);
Atom aux_head_atom(const Atom& variable, std::size_t k);
Atom evidence_atom(std::size_t i);

/// between(a,l,u) becomes above(a,l), below(a,u); every outside(a,l,u)
/// doubles the rule, once with above(a,u) and once with below(a,l), keeping
/// the head.
std::vector<Rule> convert_between_outside(const std::vector<Rule>& rules);

/// One partition per declared continuous variable, in declaration order.
/// Constants from `evidence` are merged in.
std::vector<IntervalPartition> compute_partitions(const HybridProgram& p,
                                                  const std::vector<ComparisonAtom>& evidence = {});

/// pi_k = P(b_k <= f <= b_{k+1}) / (1 - P(f <= b_k)) for k = 1..m-1.
/// Throws DegeneratePartition when a denominator vanishes.
std::vector<double> interval_fact_probabilities(const DistributionSpec& d, const IntervalPartition& partition);

/// h_k :- not f_1, ..., not f_{k-1}, f_k for k < m and
/// h_m :- not f_1, ..., not f_{m-1}. For m = 1 the single fact h_1.
std::vector<Rule> build_aux_clauses(const Atom& variable, std::size_t m);

/// Replaces above/below atoms by aux heads, one copy per satisfying interval.
/// Several comparisons on one variable are intersected; different variables
/// multiply. Throws BoundNotInPartition.
std::vector<Rule> handle_comparison_atoms(const std::vector<Rule>& rules,
                                          const std::vector<IntervalPartition>& partitions);

/// Input must be ground and validated.
DiscretizedProgram discretize(const HybridProgram& p);

/// Like discretize, with the evidence constants refining the partitions and
/// one `__ev(i) :- __h(var,k).` rule per satisfying interval of evidence i.
DiscretizedProgram discretize_with_evidence(const HybridProgram& p, const std::vector<ComparisonAtom>& evidence);

std::string to_string(const DiscretizedProgram& p);

} // namespace hpasp
