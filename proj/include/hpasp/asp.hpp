#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "hpasp/ast.hpp"

namespace hpasp {

/// Ground atoms in printed form, e.g. {"a", "b(1)"}.
using Interpretation = std::set<std::string>;

struct AnswerSetCollection {
  std::vector<Interpretation> sets; // sorted, no duplicates
  bool projected = false;
  Interpretation projection;
};

inline constexpr std::size_t kDefaultEnumerationCap = 24;

using AtomId = std::uint32_t;

struct CompiledLiteral {
  AtomId atom = 0;
  bool negated = false;
};

/// #count over ground elements. Elements sharing a tuple are alternatives:
/// the tuple counts once if any of its conditions holds.
struct CompiledAggregate {
  std::vector<std::vector<std::vector<CompiledLiteral>>> tuples;
  CmpOp op = CmpOp::Eq;
  std::int64_t bound = 0;
};

struct CompiledRule {
  std::vector<AtomId> head;
  std::vector<AtomId> pos;
  std::vector<AtomId> neg;
  std::vector<std::uint32_t> aggregates;
};

/// Propositional form of a ground program. Choice rules `{a} :- B` are
/// stored as `a ; __not_a :- B`; the fresh atom is flagged auxiliary.
class Program {
public:
  AtomId intern(const Atom& a);
  std::optional<AtomId> find(const Atom& a) const;
  std::optional<AtomId> find(const std::string& printed) const;
  const Atom& atom(AtomId id) const { return atoms_[id]; }
  const std::string& name(AtomId id) const { return names_[id]; }
  std::size_t atom_count() const { return atoms_.size(); }
  bool is_aux(AtomId id) const { return aux_[id] != 0; }
  void mark_aux(AtomId id) { aux_[id] = 1; }

  std::vector<CompiledRule> rules;
  std::vector<CompiledAggregate> aggregates;

private:
  std::vector<Atom> atoms_;
  std::vector<std::string> names_;
  std::vector<char> aux_;
  std::unordered_map<std::string, AtomId> index_;
};

/// Throws IllegalComparison if a comparison atom is left, and
/// RecursiveAggregate if an aggregate depends on the head of its own rule.
/// Atoms in `preset` get the ids 0, 1, ... in that order.
Program compile(const std::vector<Rule>& rules, const std::vector<Atom>& preset = {});

/// `{a} :- B` becomes `a ; __not_a :- B`.
std::vector<Rule> desugar_choice(const std::vector<Rule>& rules);

/// Count of distinct tuples whose condition holds in i.
std::int64_t evaluate_aggregate(const AggregateAtom& agg, const Interpretation& i);

/// Rules (choices desugared) whose body is true in i, with negative literals
/// and aggregates removed.
std::vector<Rule> reduct(const std::vector<Rule>& p, const Interpretation& i);

/// i must mention only non-auxiliary atoms; the fresh atoms of choice rules
/// are filled in from i.
bool is_stable_model(const std::vector<Rule>& p, const Interpretation& i);

AnswerSetCollection answer_sets(const std::vector<Rule>& p, std::size_t cap = kDefaultEnumerationCap);

AnswerSetCollection projected_answer_sets(const std::vector<Rule>& p, const std::vector<Atom>& atoms,
                                          std::size_t cap = kDefaultEnumerationCap);

/// Facts turned into choice rules `{f}.`, as in projected-enumeration
/// inference.
std::vector<Rule> to_choice_program(const std::vector<ProbFactDecl>& facts, const std::vector<Rule>& rules);

/// Stable-model search over a Program. Atom values can be pinned from
/// outside (probabilistic facts of a world) and rules switched off.
/// Not thread-safe; use one per thread.
class Solver {
public:
  enum : std::int8_t { kFalse = 0, kTrue = 1, kUnknown = -1 };

  explicit Solver(const Program& p);

  /// Sets of projections onto `watched`, one char ('0'/'1') per atom.
  /// `fixed` has one entry per atom (kUnknown = free); `enabled` one per rule
  /// (empty = all). Throws EnumerationCapExceeded when more than `cap` atoms
  /// remain free after the first propagation.
  std::set<std::string> projected(const std::vector<std::int8_t>& fixed, const std::vector<char>& enabled,
                                  const std::vector<AtomId>& watched, std::size_t cap);

  /// Exact stability check of a total assignment.
  bool is_stable(const std::vector<std::int8_t>& values, const std::vector<std::int8_t>& fixed,
                 const std::vector<char>& enabled);

  const Program& program() const { return prog_; }

private:
  bool propagate(std::vector<std::int8_t>& v) const;
  int aggregate_state(std::uint32_t agg, const std::vector<std::int8_t>& v) const;
  int literal_state(AtomId a, bool negated, const std::vector<std::int8_t>& v) const;
  bool exists(std::vector<std::int8_t> v);
  void search(std::vector<std::int8_t> v, const std::vector<AtomId>& watched, std::set<std::string>& out);
  bool minimal(const std::vector<std::int8_t>& v) const;
  bool enabled(std::size_t r) const { return enabled_.empty() || enabled_[r]; }

  const Program& prog_;
  std::vector<std::vector<std::uint32_t>> rules_with_head_;
  std::vector<std::int8_t> fixed_;
  std::vector<char> enabled_;
};

} // namespace hpasp
