#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "hpasp/discretizer.hpp"
#include "hpasp/exact.hpp"

namespace hpasp {

enum class SampleMode { Discrete, Hybrid };

struct SampleConfig {
  std::uint64_t n_samples = 1000;
  std::uint64_t seed = 0;
  SampleMode mode = SampleMode::Discrete;
  bool cache_enabled = true;
  /// Past this many entries the cache stops memoizing (no eviction).
  std::size_t cache_max = std::numeric_limits<std::size_t>::max();
  unsigned threads = 1;
  /// Divide by the satisfiable fraction of samples.
  bool normalize = false;
  std::size_t enumeration_cap = kDefaultInferenceEnumerationCap;
};

struct EstimateResult {
  double lower_hat = 0.0;
  double upper_hat = 0.0;
  std::uint64_t samples_taken = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t unsat_samples = 0;
  bool normalized = false;
};

/// A sampled world: its cache key and the residual ground program.
struct SampledProgram {
  std::string key;
  std::vector<Rule> program;
};

/// Includes each fact independently with its probability. Key: fact bits.
SampledProgram sample_world_discrete(const DiscretizedProgram& p, SplitMix64& rng);

/// Draws every discrete fact and continuous variable, drops rules with a
/// false comparison and strips the true ones. Key: fact bits followed by one
/// bit per comparison occurrence after between/outside conversion.
SampledProgram sample_and_reduce_hybrid(const HybridProgram& p, SplitMix64& rng);

/// Sample i uses SplitMix64::stream(cfg.seed, i), so results do not depend on
/// the thread count. Discrete mode discretizes `p` first (with comparison
/// atoms of the query folded in as evidence indicators).
/// Unsatisfiable samples are counted and excluded from both numerators.
EstimateResult estimate(const HybridProgram& p, const std::vector<BodyElement>& query, const SampleConfig& cfg,
                        const std::vector<BodyElement>& evidence = {});

/// Discrete-mode estimate on an already discretized program.
EstimateResult estimate(const DiscretizedProgram& p, const Query& query, const SampleConfig& cfg,
                        const Query& evidence = {});

/// ceil((eps + 1/2) / (eps^2 delta)), eps and delta in (0, 1].
std::uint64_t samples_for_absolute_error(double epsilon, double delta);

/// ceil(3 / eps^2 * ln(1/delta)), eps in (0, 1], delta in (0, 1).
std::uint64_t samples_for_relative_error(double epsilon, double delta);

} // namespace hpasp
