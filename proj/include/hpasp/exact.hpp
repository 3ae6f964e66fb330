#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hpasp/asp.hpp"
#include "hpasp/discretizer.hpp"

namespace hpasp {

inline constexpr std::size_t kDefaultWorldCap = 26;
/// Undecided-atom cap per world; larger than the plain enumeration default
/// because worlds of generated benchmarks keep a few dozen residual atoms.
inline constexpr std::size_t kDefaultInferenceEnumerationCap = 64;

/// Conjunction of ground literals.
using Query = std::vector<Literal>;

struct World {
  std::vector<char> assignment; // one entry per fact, in declaration order
  double probability = 1.0;
};

enum class WorldClass { LowerAndUpper, UpperOnly, NoContribution, Unsatisfiable };

std::string_view to_string(WorldClass c);

struct CredalResult {
  double lower = 0.0;
  double upper = 0.0;
  double inconsistent = 0.0;
  bool normalized = false;
  std::uint64_t worlds_enumerated = 0;
};

struct ExactOptions {
  std::size_t world_cap = kDefaultWorldCap;
  std::size_t enumeration_cap = kDefaultInferenceEnumerationCap;
  unsigned threads = 1;
  bool normalize = false;
  /// Memoize worlds that agree on everything the non-deterministic part of
  /// the program can observe.
  bool cache = true;
};

/// Neumaier compensated sum.
class CompensatedSum {
public:
  void add(double x);
  void add(const CompensatedSum& o);
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Calls `visit` for each of the 2^T worlds. Fact 0 is the most significant
/// bit of the world index, so worlds come in lexicographic order.
/// The program passed along holds the rules plus the selected facts.
/// Throws WorldCapExceeded.
void enumerate_worlds(const DiscretizedProgram& p,
                      const std::function<void(const World&, const std::vector<Rule>&)>& visit,
                      std::size_t world_cap = kDefaultWorldCap);

/// Classification by answer sets projected onto the query atoms.
WorldClass classify_world(const std::vector<Rule>& world_program, const Query& query,
                          std::size_t cap = kDefaultInferenceEnumerationCap);

CredalResult credal_query(const DiscretizedProgram& p, const Query& query, const ExactOptions& options = {});

/// LP(q|e) = LP(q,e) / (LP(q,e) + UP(not q,e)),
/// UP(q|e) = UP(q,e) / (UP(q,e) + LP(not q,e)). Throws UndefinedConditional.
CredalResult conditional_query(const DiscretizedProgram& p, const Query& query, const Query& evidence,
                               const ExactOptions& options = {});

/// Query and evidence may contain comparison atoms on continuous variables;
/// those are folded into the discretization as evidence indicators.
/// `p` must be ground and validated.
CredalResult solve_hybrid(const HybridProgram& p, const std::vector<BodyElement>& query,
                          const std::vector<BodyElement>& evidence, const ExactOptions& options = {});

/// Splits comparison atoms out of a conjunction: comparisons are appended to
/// `comparisons` and replaced by indicator literals `__ev(i)`.
Query fold_comparisons(const std::vector<BodyElement>& conj, std::vector<ComparisonAtom>& comparisons);

/// Evaluates worlds of a propositional program. Atoms that depend only on the
/// facts through non-disjunctive, aggregate-free rules are computed directly;
/// the solver only sees the rest. Not thread-safe.
class WorldEngine {
public:
  WorldEngine(const std::vector<Atom>& facts, const std::vector<Rule>& rules, const std::vector<Atom>& watched,
              std::size_t enumeration_cap);
  WorldEngine(const WorldEngine&) = delete;
  WorldEngine& operator=(const WorldEngine&) = delete;

  std::size_t fact_count() const { return fact_count_; }
  std::size_t rule_count() const { return program_.rules.size(); }

  /// Projections of the world's answer sets onto the watched atoms. `enabled`
  /// may switch rules off (empty = all on). With `memoize`, results are kept
  /// per observable world signature.
  const std::vector<std::string>& evaluate(const std::vector<char>& facts, const std::vector<char>& enabled,
                                           bool memoize);

  std::size_t memo_size() const { return memo_.size(); }

private:
  Program program_;
  Solver solver_;
  std::size_t fact_count_ = 0;
  std::size_t cap_ = 0;
  std::vector<AtomId> watched_;
  std::vector<char> determined_;
  std::vector<AtomId> order_;               // determined non-fact atoms, evaluation order
  std::vector<std::vector<std::uint32_t>> defs_;
  std::vector<AtomId> boundary_;            // determined atoms visible to the residual rules
  std::vector<std::uint32_t> residual_;     // rules that go to the solver
  std::vector<std::int8_t> fixed_;
  std::vector<char> enabled_;
  std::vector<std::string> scratch_;
  std::unordered_map<std::string, std::vector<std::string>> memo_;
};

/// Per-world verdicts derived from projected masks.
struct WorldOutcome {
  bool satisfiable = false;
  bool q_all = false;
  bool q_some = false;
  bool nq_all = false;
  bool nq_some = false;
};

/// Literal positions inside the watched-atom mask.
struct MaskQuery {
  std::vector<std::pair<std::size_t, bool>> literals; // (index, negated)
  bool holds(const std::string& mask) const;
};

/// query holds in all/some masks, and likewise for its negation; with
/// evidence, both are conjoined with the evidence.
WorldOutcome judge(const std::vector<std::string>& masks, const MaskQuery& q, const MaskQuery* evidence);

/// Positions of q's atoms in `watched`; every atom must be there.
MaskQuery mask_query(const Query& q, const std::vector<Atom>& watched);

/// Distinct atoms of q, then of e, in order of appearance.
std::vector<Atom> watched_atoms(const Query& q, const Query& e);

} // namespace hpasp
