#include "hpasp/exact.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

namespace hpasp {

namespace {

constexpr std::uint64_t kChunk = 4096;

struct Sums {
  CompensatedSum lower;   // q (and e) in every answer set
  CompensatedSum upper;   // q (and e) in some answer set
  CompensatedSum nlower;  // not q (and e) in every answer set
  CompensatedSum nupper;  // not q (and e) in some answer set
  CompensatedSum inconsistent;

  void add(const Sums& o) {
    lower.add(o.lower);
    upper.add(o.upper);
    nlower.add(o.nlower);
    nupper.add(o.nupper);
    inconsistent.add(o.inconsistent);
  }
};

std::vector<Atom> fact_atoms(const DiscretizedProgram& p) {
  std::vector<Atom> out;
  out.reserve(p.facts.size());
  for (const auto& f : p.facts) out.push_back(f.atom);
  return out;
}

void check_world_cap(std::size_t t, std::size_t cap) {
  if (t > cap || t > 62) {
    throw Error(ErrorKind::WorldCapExceeded, std::to_string(t) + " probabilistic facts give 2^" + std::to_string(t) +
                                                 " worlds; the cap is 2^" + std::to_string(std::min<std::size_t>(cap, 62)));
  }
}

void check_query(const Query& q, const char* what) {
  for (const auto& l : q) {
    if (!l.atom.is_ground()) {
      throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be ground: " + to_string(l));
    }
  }
}

Sums run_worlds(const DiscretizedProgram& p, const Query& query, const Query* evidence, const ExactOptions& options,
                std::uint64_t& worlds) {
  const std::size_t t = p.facts.size();
  check_world_cap(t, options.world_cap);
  check_query(query, "query");
  if (evidence) check_query(*evidence, "evidence");
  const Query empty;
  const auto watched = watched_atoms(query, evidence ? *evidence : empty);
  const MaskQuery mq = mask_query(query, watched);
  const MaskQuery me = evidence ? mask_query(*evidence, watched) : MaskQuery{};
  const auto facts = fact_atoms(p);
  std::vector<double> prob;
  for (const auto& f : p.facts) prob.push_back(f.prob);

  const std::uint64_t total = std::uint64_t{1} << t;
  const std::uint64_t chunks = (total + kChunk - 1) / kChunk;
  std::vector<Sums> partial(chunks);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    try {
      WorldEngine engine(facts, p.rules, watched, options.enumeration_cap);
      std::vector<char> bits(t);
      for (;;) {
        const std::uint64_t c = next.fetch_add(1);
        if (c >= chunks) return;
        Sums& s = partial[c];
        const std::uint64_t end = std::min(total, (c + 1) * kChunk);
        for (std::uint64_t w = c * kChunk; w < end; ++w) {
          double pw = 1.0;
          for (std::size_t i = 0; i < t; ++i) {
            bits[i] = static_cast<char>((w >> (t - 1 - i)) & 1U);
            pw *= bits[i] ? prob[i] : 1.0 - prob[i];
          }
          const auto& masks = engine.evaluate(bits, {}, options.cache);
          const WorldOutcome o = judge(masks, mq, evidence ? &me : nullptr);
          if (!o.satisfiable) s.inconsistent.add(pw);
          if (o.q_all) s.lower.add(pw);
          if (o.q_some) s.upper.add(pw);
          if (o.nq_all) s.nlower.add(pw);
          if (o.nq_some) s.nupper.add(pw);
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = chunks;
    }
  };

  const unsigned threads = std::max(1U, std::min<unsigned>(options.threads, static_cast<unsigned>(chunks)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  Sums total_sums;
  for (const auto& s : partial) total_sums.add(s);
  worlds = total;
  return total_sums;
}

} // namespace

std::string_view to_string(WorldClass c) {
  switch (c) {
  case WorldClass::LowerAndUpper: return "LowerAndUpper";
  case WorldClass::UpperOnly: return "UpperOnly";
  case WorldClass::NoContribution: return "NoContribution";
  case WorldClass::Unsatisfiable: return "Unsatisfiable";
  }
  return "?";
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::fabs(sum_) >= std::fabs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

void CompensatedSum::add(const CompensatedSum& o) {
  add(o.sum_);
  add(o.comp_);
}

bool MaskQuery::holds(const std::string& mask) const {
  for (const auto& [i, negated] : literals) {
    if ((mask[i] == '1') == negated) return false;
  }
  return true;
}

WorldOutcome judge(const std::vector<std::string>& masks, const MaskQuery& q, const MaskQuery* evidence) {
  WorldOutcome o;
  o.satisfiable = !masks.empty();
  if (!o.satisfiable) return o;
  o.q_all = o.nq_all = true;
  for (const auto& m : masks) {
    const bool e = evidence == nullptr || evidence->holds(m);
    const bool qv = q.holds(m);
    const bool pos = e && qv;
    const bool neg = e && !qv;
    o.q_all = o.q_all && pos;
    o.q_some = o.q_some || pos;
    o.nq_all = o.nq_all && neg;
    o.nq_some = o.nq_some || neg;
  }
  return o;
}

MaskQuery mask_query(const Query& q, const std::vector<Atom>& watched) {
  MaskQuery out;
  for (const auto& l : q) {
    const auto it = std::find(watched.begin(), watched.end(), l.atom);
    out.literals.emplace_back(static_cast<std::size_t>(it - watched.begin()), l.negated);
  }
  return out;
}

std::vector<Atom> watched_atoms(const Query& q, const Query& e) {
  std::vector<Atom> out;
  for (const Query* part : {&q, &e}) {
    for (const auto& l : *part) {
      if (std::find(out.begin(), out.end(), l.atom) == out.end()) out.push_back(l.atom);
    }
  }
  return out;
}

void enumerate_worlds(const DiscretizedProgram& p,
                      const std::function<void(const World&, const std::vector<Rule>&)>& visit,
                      std::size_t world_cap) {
  const std::size_t t = p.facts.size();
  check_world_cap(t, world_cap);
  const std::uint64_t total = std::uint64_t{1} << t;
  World world;
  world.assignment.resize(t);
  for (std::uint64_t w = 0; w < total; ++w) {
    std::vector<Rule> program = p.rules;
    world.probability = 1.0;
    for (std::size_t i = 0; i < t; ++i) {
      const bool in = ((w >> (t - 1 - i)) & 1U) != 0;
      world.assignment[i] = static_cast<char>(in);
      world.probability *= in ? p.facts[i].prob : 1.0 - p.facts[i].prob;
      if (in) program.push_back(Rule{{p.facts[i].atom}, false, {}, p.facts[i].loc});
    }
    visit(world, program);
  }
}

WorldClass classify_world(const std::vector<Rule>& world_program, const Query& query, std::size_t cap) {
  const auto watched = watched_atoms(query, {});
  const auto sets = projected_answer_sets(world_program, watched, cap);
  if (sets.sets.empty()) return WorldClass::Unsatisfiable;
  std::size_t hits = 0;
  for (const auto& s : sets.sets) {
    bool ok = true;
    for (const auto& l : query) {
      if ((s.count(to_string(l.atom)) > 0) == l.negated) ok = false;
    }
    hits += ok ? 1 : 0;
  }
  if (hits == sets.sets.size()) return WorldClass::LowerAndUpper;
  return hits > 0 ? WorldClass::UpperOnly : WorldClass::NoContribution;
}

CredalResult credal_query(const DiscretizedProgram& p, const Query& query, const ExactOptions& options) {
  CredalResult r;
  const Sums s = run_worlds(p, query, nullptr, options, r.worlds_enumerated);
  r.lower = s.lower.value();
  r.upper = s.upper.value();
  r.inconsistent = s.inconsistent.value();
  if (options.normalize) {
    const double z = 1.0 - r.inconsistent;
    if (!(z > 0.0)) throw Error(ErrorKind::AllWorldsInconsistent, "every world is unsatisfiable; normalization is undefined");
    r.lower /= z;
    r.upper /= z;
    r.normalized = true;
  }
  r.lower = std::clamp(r.lower, 0.0, 1.0);
  r.upper = std::clamp(r.upper, r.lower, 1.0);
  return r;
}

CredalResult conditional_query(const DiscretizedProgram& p, const Query& query, const Query& evidence,
                               const ExactOptions& options) {
  if (evidence.empty()) return credal_query(p, query, options);
  CredalResult r;
  const Sums s = run_worlds(p, query, &evidence, options, r.worlds_enumerated);
  const double lqe = s.lower.value();
  const double uqe = s.upper.value();
  const double lnqe = s.nlower.value();
  const double unqe = s.nupper.value();
  const double dl = lqe + unqe;
  const double du = uqe + lnqe;
  if (!(dl > 0.0) || !(du > 0.0)) {
    throw Error(ErrorKind::UndefinedConditional, "the evidence has zero probability; the conditional is undefined");
  }
  r.lower = std::clamp(lqe / dl, 0.0, 1.0);
  r.upper = std::clamp(uqe / du, r.lower, 1.0);
  r.inconsistent = s.inconsistent.value();
  r.normalized = true;
  return r;
}

Query fold_comparisons(const std::vector<BodyElement>& conj, std::vector<ComparisonAtom>& comparisons) {
  Query out;
  for (const auto& e : conj) {
    if (const auto* l = std::get_if<Literal>(&e)) {
      out.push_back(*l);
    } else if (const auto* c = std::get_if<ComparisonAtom>(&e)) {
      out.push_back(Literal{evidence_atom(comparisons.size()), false});
      comparisons.push_back(*c);
    } else {
      throw Error(ErrorKind::InvalidArgument, "queries and evidence take literals and comparison atoms only, got " +
                                                  to_string(e));
    }
  }
  return out;
}

CredalResult solve_hybrid(const HybridProgram& p, const std::vector<BodyElement>& query,
                          const std::vector<BodyElement>& evidence, const ExactOptions& options) {
  std::vector<ComparisonAtom> comparisons;
  const Query q = fold_comparisons(query, comparisons);
  const Query e = fold_comparisons(evidence, comparisons);
  const DiscretizedProgram d = discretize_with_evidence(p, comparisons);
  return e.empty() ? credal_query(d, q, options) : conditional_query(d, q, e, options);
}

WorldEngine::WorldEngine(const std::vector<Atom>& facts, const std::vector<Rule>& rules,
                         const std::vector<Atom>& watched, std::size_t enumeration_cap)
    : program_([&] {
        std::vector<Atom> preset = facts;
        preset.insert(preset.end(), watched.begin(), watched.end());
        return compile(rules, preset);
      }()),
      solver_(program_), fact_count_(facts.size()), cap_(enumeration_cap) {
  for (const auto& w : watched) watched_.push_back(*program_.find(w));
  const std::size_t n = program_.atom_count();
  defs_.assign(n, {});
  for (std::uint32_t r = 0; r < program_.rules.size(); ++r) {
    for (AtomId h : program_.rules[r].head) defs_[h].push_back(r);
  }
  determined_.assign(n, 0);
  for (std::size_t i = 0; i < fact_count_; ++i) determined_[i] = 1;
  for (bool grew = true; grew;) {
    grew = false;
    for (AtomId a = 0; a < n; ++a) {
      if (determined_[a] || program_.is_aux(a)) continue;
      bool ok = true;
      for (auto r : defs_[a]) {
        const auto& cr = program_.rules[r];
        if (cr.head.size() != 1 || !cr.aggregates.empty()) ok = false;
        for (AtomId b : cr.pos) ok = ok && determined_[b];
        for (AtomId b : cr.neg) ok = ok && determined_[b];
        if (!ok) break;
      }
      if (ok) {
        determined_[a] = 1;
        order_.push_back(a);
        grew = true;
      }
    }
  }
  std::vector<char> visible(n, 0);
  for (std::uint32_t r = 0; r < program_.rules.size(); ++r) {
    const auto& cr = program_.rules[r];
    if (!cr.head.empty() && determined_[cr.head[0]]) continue;
    residual_.push_back(r);
    for (AtomId b : cr.pos) visible[b] = 1;
    for (AtomId b : cr.neg) visible[b] = 1;
    for (auto g : cr.aggregates) {
      for (const auto& tuple : program_.aggregates[g].tuples) {
        for (const auto& alt : tuple) {
          for (const auto& l : alt) visible[l.atom] = 1;
        }
      }
    }
  }
  for (AtomId w : watched_) visible[w] = 1;
  for (AtomId a = 0; a < n; ++a) {
    if (visible[a] && determined_[a]) boundary_.push_back(a);
  }
  fixed_.assign(n, Solver::kUnknown);
  enabled_.assign(program_.rules.size(), 0);
}

const std::vector<std::string>& WorldEngine::evaluate(const std::vector<char>& facts, const std::vector<char>& enabled,
                                                      bool memoize) {
  auto on = [&](std::uint32_t r) { return enabled.empty() || enabled[r]; };
  for (std::size_t i = 0; i < fact_count_; ++i) fixed_[i] = facts[i] ? Solver::kTrue : Solver::kFalse;
  for (AtomId a : order_) {
    bool value = false;
    for (auto r : defs_[a]) {
      if (!on(r)) continue;
      const auto& cr = program_.rules[r];
      bool body = true;
      for (AtomId b : cr.pos) body = body && fixed_[b] == Solver::kTrue;
      for (AtomId b : cr.neg) body = body && fixed_[b] == Solver::kFalse;
      if (body) {
        value = true;
        break;
      }
    }
    fixed_[a] = value ? Solver::kTrue : Solver::kFalse;
  }
  for (auto r : residual_) enabled_[r] = on(r) ? 1 : 0;

  std::string key;
  if (memoize) {
    key.reserve(boundary_.size() + (enabled.empty() ? 0 : residual_.size()));
    for (AtomId a : boundary_) key.push_back(fixed_[a] == Solver::kTrue ? '1' : '0');
    if (!enabled.empty()) {
      for (auto r : residual_) key.push_back(enabled_[r] ? '1' : '0');
    }
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  const auto masks = solver_.projected(fixed_, enabled_, watched_, cap_);
  if (memoize) {
    return memo_.emplace(std::move(key), std::vector<std::string>(masks.begin(), masks.end())).first->second;
  }
  scratch_.assign(masks.begin(), masks.end());
  return scratch_;
}

} // namespace hpasp
