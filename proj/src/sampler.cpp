#include "hpasp/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <thread>
#include <unordered_map>

namespace hpasp {

namespace {

constexpr std::uint64_t kBlock = 1024;

// Comparison occurrence in a rule body after between/outside conversion.
struct Occurrence {
  std::size_t variable = 0;
  bool below = true;
  double bound = 0.0;
};

bool comparison_holds(const Occurrence& o, const std::vector<double>& values) {
  const double x = values[o.variable];
  return o.below ? x < o.bound : x > o.bound;
}

std::size_t continuous_index(const HybridProgram& p, const Atom& a) {
  for (std::size_t i = 0; i < p.continuous.size(); ++i) {
    if (p.continuous[i].atom == a) return i;
  }
  throw Error(ErrorKind::UnknownContinuousVariable, "undeclared continuous variable " + to_string(a));
}

// Rules with their comparisons stripped, and the occurrences per rule.
struct HybridPlan {
  std::vector<Rule> rules;
  std::vector<std::vector<Occurrence>> occurrences;
  std::size_t occurrence_count = 0;
};

HybridPlan plan_hybrid(const HybridProgram& p, const std::vector<Rule>& extra) {
  std::vector<Rule> all = p.rules;
  all.insert(all.end(), extra.begin(), extra.end());
  HybridPlan plan;
  for (auto& r : convert_between_outside(all)) {
    std::vector<Occurrence> occ;
    std::vector<BodyElement> body;
    for (auto& e : r.body) {
      if (const auto* c = std::get_if<ComparisonAtom>(&e)) {
        occ.push_back({continuous_index(p, c->variable), c->kind == ComparisonAtom::Kind::Below, c->value(0)});
      } else {
        body.push_back(std::move(e));
      }
    }
    r.body = std::move(body);
    plan.occurrence_count += occ.size();
    plan.occurrences.push_back(std::move(occ));
    plan.rules.push_back(std::move(r));
  }
  return plan;
}

void draw_facts(const std::vector<ProbFactDecl>& facts, SplitMix64& rng, std::vector<char>& bits) {
  bits.resize(facts.size());
  for (std::size_t i = 0; i < facts.size(); ++i) bits[i] = rng.uniform() < facts[i].prob ? 1 : 0;
}

void draw_values(const HybridProgram& p, SplitMix64& rng, std::vector<double>& values) {
  values.resize(p.continuous.size());
  for (std::size_t i = 0; i < p.continuous.size(); ++i) values[i] = p.continuous[i].dist.sample(rng);
}

// Fills `enabled` (one entry per plan rule) and appends comparison bits to key.
void evaluate_comparisons(const HybridPlan& plan, const std::vector<double>& values, std::vector<char>& enabled,
                          std::string& key) {
  enabled.assign(plan.rules.size(), 1);
  for (std::size_t r = 0; r < plan.rules.size(); ++r) {
    for (const auto& o : plan.occurrences[r]) {
      const bool v = comparison_holds(o, values);
      key.push_back(v ? '1' : '0');
      if (!v) enabled[r] = 0;
    }
  }
}

std::string fact_key(const std::vector<char>& bits) {
  std::string key(bits.size(), '0');
  for (std::size_t i = 0; i < bits.size(); ++i) key[i] = bits[i] ? '1' : '0';
  return key;
}

void check_ground(const Query& q) {
  for (const auto& l : q) {
    if (!l.atom.is_ground()) throw Error(ErrorKind::InvalidArgument, "query must be ground: " + to_string(l));
  }
}

struct Counters {
  std::uint64_t q_all = 0, q_some = 0, nq_all = 0, nq_some = 0;
  std::uint64_t unsat = 0, hits = 0;

  void add(const Counters& o) {
    q_all += o.q_all;
    q_some += o.q_some;
    nq_all += o.nq_all;
    nq_some += o.nq_some;
    unsat += o.unsat;
    hits += o.hits;
  }
};

// Fills the key, the fact bits and the enabled-rule mask of one sample.
using Drawer = std::function<void(SplitMix64&, std::string&, std::vector<char>&, std::vector<char>&)>;

struct Job {
  std::vector<Atom> facts;
  const std::vector<Rule>* rules = nullptr;
  Drawer draw;
};

EstimateResult run(const Job& job, const Query& query, const Query* evidence, const SampleConfig& cfg) {
  if (cfg.n_samples == 0) throw Error(ErrorKind::InvalidArgument, "the number of samples must be at least 1");
  check_ground(query);
  if (evidence) check_ground(*evidence);
  const Query empty;
  const auto watched = watched_atoms(query, evidence ? *evidence : empty);
  const MaskQuery mq = mask_query(query, watched);
  const MaskQuery me = evidence ? mask_query(*evidence, watched) : MaskQuery{};

  const std::uint64_t blocks = (cfg.n_samples + kBlock - 1) / kBlock;
  const unsigned threads = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(cfg.threads, blocks)));
  std::vector<Counters> partial(threads);
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&](unsigned j) {
    try {
      WorldEngine engine(job.facts, *job.rules, watched, cfg.enumeration_cap);
      std::unordered_map<std::string, WorldOutcome> cache;
      std::string key;
      std::vector<char> bits;
      std::vector<char> enabled;
      Counters& c = partial[j];
      for (std::uint64_t b = j; b < blocks; b += threads) {
        const std::uint64_t end = std::min(cfg.n_samples, (b + 1) * kBlock);
        for (std::uint64_t i = b * kBlock; i < end; ++i) {
          SplitMix64 rng = SplitMix64::stream(cfg.seed, i);
          key.clear();
          job.draw(rng, key, bits, enabled);
          WorldOutcome o;
          auto it = cfg.cache_enabled ? cache.find(key) : cache.end();
          if (it != cache.end()) {
            o = it->second;
            ++c.hits;
          } else {
            o = judge(engine.evaluate(bits, enabled, false), mq, evidence ? &me : nullptr);
            if (cfg.cache_enabled && cache.size() < cfg.cache_max) cache.emplace(key, o);
          }
          if (!o.satisfiable) ++c.unsat;
          c.q_all += o.q_all;
          c.q_some += o.q_some;
          c.nq_all += o.nq_all;
          c.nq_some += o.nq_some;
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < threads; ++j) pool.emplace_back(worker, j);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  Counters total;
  for (const auto& c : partial) total.add(c);

  EstimateResult r;
  r.samples_taken = cfg.n_samples;
  r.cache_hits = total.hits;
  r.unsat_samples = total.unsat;
  if (evidence && !evidence->empty()) {
    const double dl = static_cast<double>(total.q_all + total.nq_some);
    const double du = static_cast<double>(total.q_some + total.nq_all);
    if (!(dl > 0.0) || !(du > 0.0)) {
      throw Error(ErrorKind::UndefinedConditional, "no sample supports the evidence; the conditional is undefined");
    }
    r.lower_hat = static_cast<double>(total.q_all) / dl;
    r.upper_hat = static_cast<double>(total.q_some) / du;
    r.normalized = true;
  } else {
    double n = static_cast<double>(cfg.n_samples);
    if (cfg.normalize) {
      if (total.unsat == cfg.n_samples) {
        throw Error(ErrorKind::AllWorldsInconsistent, "every sample is unsatisfiable; normalization is undefined");
      }
      n = static_cast<double>(cfg.n_samples - total.unsat);
      r.normalized = true;
    }
    r.lower_hat = static_cast<double>(total.q_all) / n;
    r.upper_hat = static_cast<double>(total.q_some) / n;
  }
  r.lower_hat = std::clamp(r.lower_hat, 0.0, 1.0);
  r.upper_hat = std::clamp(r.upper_hat, r.lower_hat, 1.0);
  return r;
}

std::uint64_t ceil_guarded(double x) {
  return static_cast<std::uint64_t>(std::ceil(x * (1.0 - 1e-12)));
}

} // namespace

SampledProgram sample_world_discrete(const DiscretizedProgram& p, SplitMix64& rng) {
  std::vector<char> bits;
  draw_facts(p.facts, rng, bits);
  SampledProgram out;
  out.key = fact_key(bits);
  out.program = p.rules;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out.program.push_back(Rule{{p.facts[i].atom}, false, {}, p.facts[i].loc});
  }
  return out;
}

SampledProgram sample_and_reduce_hybrid(const HybridProgram& p, SplitMix64& rng) {
  const HybridPlan plan = plan_hybrid(p, {});
  std::vector<char> bits;
  std::vector<double> values;
  std::vector<char> enabled;
  draw_facts(p.facts, rng, bits);
  draw_values(p, rng, values);
  SampledProgram out;
  out.key = fact_key(bits);
  evaluate_comparisons(plan, values, enabled, out.key);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out.program.push_back(Rule{{p.facts[i].atom}, false, {}, p.facts[i].loc});
  }
  for (std::size_t r = 0; r < plan.rules.size(); ++r) {
    if (enabled[r]) out.program.push_back(plan.rules[r]);
  }
  return out;
}

EstimateResult estimate(const DiscretizedProgram& p, const Query& query, const SampleConfig& cfg,
                        const Query& evidence) {
  Job job;
  for (const auto& f : p.facts) job.facts.push_back(f.atom);
  job.rules = &p.rules;
  job.draw = [&p](SplitMix64& rng, std::string& key, std::vector<char>& bits, std::vector<char>& enabled) {
    draw_facts(p.facts, rng, bits);
    key = fact_key(bits);
    enabled.clear();
  };
  return run(job, query, evidence.empty() ? nullptr : &evidence, cfg);
}

EstimateResult estimate(const HybridProgram& p, const std::vector<BodyElement>& query, const SampleConfig& cfg,
                        const std::vector<BodyElement>& evidence) {
  std::vector<ComparisonAtom> comparisons;
  const Query q = fold_comparisons(query, comparisons);
  const Query e = fold_comparisons(evidence, comparisons);
  if (cfg.mode == SampleMode::Discrete) {
    const DiscretizedProgram d = discretize_with_evidence(p, comparisons);
    return estimate(d, q, cfg, e);
  }
  std::vector<Rule> extra;
  for (std::size_t i = 0; i < comparisons.size(); ++i) {
    extra.push_back(Rule{{evidence_atom(i)}, false, {BodyElement{comparisons[i]}}, {}});
  }
  const HybridPlan plan = plan_hybrid(p, extra);
  Job job;
  for (const auto& f : p.facts) job.facts.push_back(f.atom);
  job.rules = &plan.rules;
  job.draw = [&p, &plan](SplitMix64& rng, std::string& key, std::vector<char>& bits, std::vector<char>& enabled) {
    thread_local std::vector<double> values;
    draw_facts(p.facts, rng, bits);
    draw_values(p, rng, values);
    key = fact_key(bits);
    evaluate_comparisons(plan, values, enabled, key);
  };
  return run(job, q, e.empty() ? nullptr : &e, cfg);
}

std::uint64_t samples_for_absolute_error(double epsilon, double delta) {
  if (!(epsilon > 0.0 && epsilon <= 1.0) || !(delta > 0.0 && delta <= 1.0)) {
    throw Error(ErrorKind::InvalidTolerance, "absolute error needs epsilon and delta in (0, 1]");
  }
  return ceil_guarded((epsilon + 0.5) / (epsilon * epsilon * delta));
}

std::uint64_t samples_for_relative_error(double epsilon, double delta) {
  if (!(epsilon > 0.0 && epsilon <= 1.0) || !(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorKind::InvalidTolerance, "relative error needs epsilon in (0, 1] and delta in (0, 1)");
  }
  return ceil_guarded(3.0 / (epsilon * epsilon) * std::log(1.0 / delta));
}

} // namespace hpasp
