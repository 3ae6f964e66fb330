#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hpasp/benchgen.hpp"
#include "hpasp/discretizer.hpp"
#include "hpasp/exact.hpp"
#include "hpasp/grounder.hpp"
#include "hpasp/sampler.hpp"

namespace {

using namespace hpasp;
using nlohmann::json;

struct Common {
  std::string input = "-";
  bool variance = false;
  std::string format = "text";
};

std::string read_input(const std::string& path) {
  std::ostringstream s;
  if (path == "-") {
    s << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open " + path);
    s << in.rdbuf();
  }
  return s.str();
}

ParseOptions parse_options(const Common& c) {
  ParseOptions o;
  o.gaussian_param = c.variance ? GaussianParam::Variance : GaussianParam::StdDev;
  return o;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void print_credal(const CredalResult& r, const std::string& format) {
  if (format == "json") {
    json j{{"lower", r.lower},
           {"upper", r.upper},
           {"inconsistent", r.inconsistent},
           {"normalized", r.normalized},
           {"worlds_enumerated", r.worlds_enumerated}};
    std::cout << j.dump() << "\n";
  } else {
    std::cout << "lower=" << fixed6(r.lower) << " upper=" << fixed6(r.upper)
              << " inconsistent=" << fixed6(r.inconsistent) << "\n";
  }
}

void print_estimate(const EstimateResult& r, const std::string& format) {
  const double inc = r.samples_taken ? static_cast<double>(r.unsat_samples) / static_cast<double>(r.samples_taken) : 0.0;
  if (format == "json") {
    json j{{"lower", r.lower_hat},       {"upper", r.upper_hat},         {"inconsistent", inc},
           {"normalized", r.normalized}, {"samples", r.samples_taken},   {"cache_hits", r.cache_hits},
           {"unsat", r.unsat_samples}};
    std::cout << j.dump() << "\n";
  } else {
    std::cout << "lower=" << fixed6(r.lower_hat) << " upper=" << fixed6(r.upper_hat) << " inconsistent=" << fixed6(inc)
              << " samples=" << r.samples_taken << " cache_hits=" << r.cache_hits << " unsat=" << r.unsat_samples
              << "\n";
  }
}

std::vector<BodyElement> parse_query(const std::string& text, const char* what) {
  if (text.empty()) return {};
  try {
    return parse_conjunction(text);
  } catch (const Error& e) {
    throw std::runtime_error(std::string(what) + " '" + text + "': " + e.what());
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid probabilistic answer set programming"};
  app.require_subcommand(1);

  Common common;
  std::string query;
  std::string evidence;
  bool normalize = false;
  std::size_t world_cap = kDefaultWorldCap;
  std::size_t enum_cap = kDefaultInferenceEnumerationCap;
  unsigned threads = 1;

  std::uint64_t n_samples = 10000;
  std::string sample_mode = "hybrid";
  std::uint64_t seed = 0;
  bool cache = true;
  std::size_t cache_max = std::numeric_limits<std::size_t>::max();

  double epsilon = 0.0;
  double delta = 0.0;
  std::string error_mode = "absolute";

  std::string dataset;
  int size = 0;
  int k = 2;
  std::string out_path;
  bool bench_run = false;
  std::uint64_t bench_samples = 0;

  auto add_program = [&](CLI::App* sub) {
    sub->add_option("file", common.input, "Program file, - for stdin");
    sub->add_flag("--variance", common.variance, "Read the second gaussian parameter as a variance");
    sub->add_option("--format", common.format)->check(CLI::IsMember({"text", "json"}));
  };
  auto add_query = [&](CLI::App* sub) {
    sub->add_option("--query", query, "Query conjunction")->required();
    sub->add_option("--evidence", evidence, "Evidence, comma separated literals");
    sub->add_flag("--normalize", normalize, "Divide by the mass of satisfiable worlds");
    sub->add_option("--threads", threads)->check(CLI::PositiveNumber);
    sub->add_option("--enum-cap", enum_cap, "Undecided atoms allowed per world");
  };

  auto* check = app.add_subcommand("check", "Parse, ground and validate a program");
  add_program(check);

  auto* disc = app.add_subcommand("discretize", "Print the discretized program");
  add_program(disc);
  disc->add_option("--evidence", evidence, "Comparison atoms whose bounds refine the partition");

  auto* solve = app.add_subcommand("solve", "Exact credal inference");
  add_program(solve);
  add_query(solve);
  solve->add_option("--world-cap", world_cap, "Largest allowed log2 of the world count");

  auto* sample = app.add_subcommand("sample", "Approximate credal inference by sampling");
  add_program(sample);
  add_query(sample);
  sample->add_option("--n", n_samples)->check(CLI::PositiveNumber);
  sample->add_option("--mode", sample_mode)->check(CLI::IsMember({"discrete", "hybrid"}));
  sample->add_option("--seed", seed);
  sample->add_flag("--cache,!--no-cache", cache);
  sample->add_option("--cache-max", cache_max);

  auto* ss = app.add_subcommand("samplesize", "Samples needed for an error bound");
  ss->add_option("--epsilon", epsilon)->required();
  ss->add_option("--delta", delta)->required();
  ss->add_option("--mode", error_mode)->check(CLI::IsMember({"absolute", "relative"}));

  auto* bench = app.add_subcommand("bench", "Generate benchmark programs, optionally timing inference");
  bench->add_option("--dataset", dataset)->required()->check(CLI::IsMember({"t1", "t2", "t3", "t4", "t5"}));
  bench->add_option("--size", size)->required();
  bench->add_option("--k", k);
  bench->add_option("--seed", seed);
  bench->add_option("--out", out_path);
  bench->add_flag("--run", bench_run, "Run inference and print a CSV row");
  bench->add_option("--n", bench_samples, "Sample instead of exact inference");
  bench->add_option("--threads", threads)->check(CLI::PositiveNumber);
  bench->add_option("--world-cap", world_cap);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*check) {
      const HybridProgram p = prepare(read_input(common.input), parse_options(common));
      if (common.format == "json") {
        std::cout << json{{"ok", true},
                          {"facts", p.facts.size()},
                          {"continuous", p.continuous.size()},
                          {"rules", p.rules.size()}}
                         .dump()
                  << "\n";
      } else {
        std::cout << "ok facts=" << p.facts.size() << " continuous=" << p.continuous.size()
                  << " rules=" << p.rules.size() << "\n";
      }
    } else if (*disc) {
      const HybridProgram p = prepare(read_input(common.input), parse_options(common));
      std::vector<ComparisonAtom> comparisons;
      fold_comparisons(parse_query(evidence, "evidence"), comparisons);
      const DiscretizedProgram d = discretize_with_evidence(p, comparisons);
      if (common.format == "json") {
        json facts = json::array();
        for (const auto& f : d.facts) facts.push_back({{"atom", to_string(f.atom)}, {"prob", f.prob}});
        json rules = json::array();
        for (const auto& r : d.rules) rules.push_back(to_string(r));
        std::cout << json{{"facts", facts}, {"rules", rules}}.dump() << "\n";
      } else {
        std::cout << to_string(d);
      }
    } else if (*solve) {
      const HybridProgram p = prepare(read_input(common.input), parse_options(common));
      ExactOptions o;
      o.world_cap = world_cap;
      o.enumeration_cap = enum_cap;
      o.threads = threads;
      o.normalize = normalize;
      print_credal(solve_hybrid(p, parse_query(query, "query"), parse_query(evidence, "evidence"), o), common.format);
    } else if (*sample) {
      const HybridProgram p = prepare(read_input(common.input), parse_options(common));
      SampleConfig cfg;
      cfg.n_samples = n_samples;
      cfg.seed = seed;
      cfg.mode = sample_mode == "discrete" ? SampleMode::Discrete : SampleMode::Hybrid;
      cfg.cache_enabled = cache;
      cfg.cache_max = cache_max;
      cfg.threads = threads;
      cfg.normalize = normalize;
      cfg.enumeration_cap = enum_cap;
      print_estimate(estimate(p, parse_query(query, "query"), cfg, parse_query(evidence, "evidence")), common.format);
    } else if (*ss) {
      const std::uint64_t n = error_mode == "relative" ? samples_for_relative_error(epsilon, delta)
                                                       : samples_for_absolute_error(epsilon, delta);
      std::cout << n << "\n";
    } else if (*bench) {
      std::string text;
      if (dataset == "t1") text = gen_t1(size);
      if (dataset == "t2") text = gen_t2(k, size);
      if (dataset == "t3") text = gen_t3(k, size);
      if (dataset == "t4") text = gen_t4(size, seed);
      if (dataset == "t5") text = gen_t5(size);
      if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + out_path);
        out << text;
      } else if (!bench_run) {
        std::cout << text;
      }
      if (bench_run) {
        const HybridProgram p = prepare(text);
        const auto q = parse_query(bench_query(dataset), "query");
        const auto start = std::chrono::steady_clock::now();
        double lo = 0.0;
        double up = 0.0;
        std::string method;
        if (bench_samples > 0) {
          SampleConfig cfg;
          cfg.n_samples = bench_samples;
          cfg.seed = seed;
          cfg.mode = SampleMode::Hybrid;
          cfg.threads = threads;
          const auto r = estimate(p, q, cfg);
          lo = r.lower_hat;
          up = r.upper_hat;
          method = "sample";
        } else {
          ExactOptions o;
          o.world_cap = world_cap;
          o.threads = threads;
          const auto r = solve_hybrid(p, q, {}, o);
          lo = r.lower;
          up = r.upper;
          method = "exact";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << "dataset,size,k,method,lower,upper,seconds\n"
                  << dataset << "," << size << "," << k << "," << method << "," << fixed6(lo) << "," << fixed6(up)
                  << "," << fixed6(secs) << "\n";
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_limit() ? 2 : 1;
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
