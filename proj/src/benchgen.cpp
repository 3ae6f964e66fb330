#include "hpasp/benchgen.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "hpasp/distributions.hpp"
#include "hpasp/error.hpp"
#include "hpasp/format.hpp"

namespace hpasp {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::InvalidSize, what);
}

void rule_pair(std::ostringstream& out, const std::string& var) {
  out << "q0 :- below(" << var << ",0.5), not q1.\n";
  out << "q1 :- below(" << var << ",0.5), not q0.\n";
}

// Sequential bounds: lb_i = u_{i-1}, ub_i uniform in (u_{i-1}, u_{i-1} + 60/n].
std::vector<std::pair<double, double>> bound_sequence(int n, SplitMix64& rng) {
  std::vector<std::pair<double, double>> out;
  double u = -30.0;
  const double width = 60.0 / n;
  for (int i = 0; i < n; ++i) {
    const double lb = u;
    double ub = std::round((lb + rng.uniform() * width) * 1000.0) / 1000.0;
    if (ub <= lb) ub = std::round((lb + 0.001) * 1000.0) / 1000.0;
    out.emplace_back(lb, ub);
    u = ub;
  }
  return out;
}

} // namespace

std::string gen_t1(int n) {
  require(n >= 2 && n % 2 == 0, "t1 needs an even size >= 2, got " + std::to_string(n));
  std::ostringstream out;
  const int m = n / 2;
  for (int i = 1; i <= m; ++i) out << "0.5::d" << i << ".\n";
  for (int i = 1; i <= m; ++i) out << "c" << i << ":gaussian(0,1).\n";
  for (int i = 1; i <= m; ++i) rule_pair(out, "c" + std::to_string(i));
  for (int i = 1; i <= m; ++i) out << "q0 :- below(c" << i << ",0.7), d" << i << ".\n";
  return out.str();
}

std::string gen_t2(int k, int n) {
  require(k >= 1 && n >= 1, "t2 needs k >= 1 and size >= 1");
  std::ostringstream out;
  for (int i = 0; i < k; ++i) out << "0.5::d" << i << ".\n";
  for (int i = 1; i <= n; ++i) out << "c" << i << ":gaussian(0,1).\n";
  for (int i = 1; i <= n; ++i) rule_pair(out, "c" + std::to_string(i));
  for (int i = 1; i <= n; ++i) out << "q0 :- below(c" << i << ",0.7), d" << (i - 1) % k << ".\n";
  return out.str();
}

std::string gen_t3(int k, int n) {
  require(k >= 1 && n >= 1, "t3 needs k >= 1 and size >= 1");
  std::ostringstream out;
  for (int i = 1; i <= n; ++i) out << "0.5::d" << i << ".\n";
  for (int i = 0; i < k; ++i) out << "c" << i << ":gaussian(0,1).\n";
  for (int i = 0; i < k; ++i) rule_pair(out, "c" + std::to_string(i));
  for (int i = 1; i <= n; ++i) out << "q0 :- below(c" << (i - 1) % k << ",0.7), d" << i << ".\n";
  return out.str();
}

std::string gen_t4(int n, std::uint64_t seed) {
  require(n >= 1, "t4 needs size >= 1, got " + std::to_string(n));
  SplitMix64 rng(seed);
  const auto pairs = bound_sequence(n, rng);
  const auto singles = bound_sequence(n, rng);
  std::ostringstream out;
  out << "0.4::d.\n";
  out << "c:gaussian(0,10).\n";
  for (const auto& [lb, ub] : pairs) {
    const std::string b = "between(c," + format_real(lb) + "," + format_real(ub) + ")";
    out << "q0:- " << b << ", not q1.\n";
    out << "q1:- " << b << ", not q0.\n";
  }
  for (const auto& [lb, ub] : singles) {
    out << "q0:- d, between(c," << format_real(lb) << "," << format_real(ub) << ").\n";
  }
  return out.str();
}

std::string gen_t5(int n) {
  require(n >= 1, "t5 needs size >= 1, got " + std::to_string(n));
  const std::string r = "(1.." + std::to_string(n) + ")";
  std::ostringstream out;
  out << "0.4::pred_d" << r << ".\n"
      << "0.6::pred_s" << r << ".\n"
      << "d" << r << ":gamma(70,1).\n"
      << "s" << r << ":gamma(120,1).\n\n"
      << "prob_d(P):- outside(d(P), 60, 80).\n"
      << "prob_s(P):- outside(s(P), 110, 130).\n\n"
      << "prob(P):- prob_d(P), pred_d(P).\n"
      << "prob(P):- prob_s(P), pred_s(P).\n\n"
      << "stroke(P);not_stroke(P):- prob(P).\n\n"
      << ":- #count{X:prob(X)}=P,\n"
      << "   #count{X:stroke(X),prob(X)}=S,\n"
      << "   10*S < 4*P.\n\n"
      << "high_number_strokes:-\n"
      << "   #count{X : stroke(X)}=CS, CS > 1.\n";
  return out.str();
}

std::string bench_query(const std::string& dataset) {
  if (dataset == "t5") return "high_number_strokes";
  if (dataset == "t1" || dataset == "t2" || dataset == "t3" || dataset == "t4") return "q0";
  throw Error(ErrorKind::InvalidArgument, "unknown dataset " + dataset + "; expected t1..t5");
}

} // namespace hpasp
