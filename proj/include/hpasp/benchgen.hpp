#pragma once

#include <cstdint>
#include <string>

namespace hpasp {

/// Benchmark program generators. All throw InvalidSize on bad sizes.

/// n even, n >= 2: n/2 facts 0.5::di and n/2 variables ci ~ gaussian(0,1).
std::string gen_t1(int n);

/// k facts d0..d(k-1), n variables c1..cn.
std::string gen_t2(int k, int n);

/// k variables c0..c(k-1), n facts d1..dn.
std::string gen_t3(int k, int n);

/// One fact d, one variable c ~ gaussian(0,10) and 3n between-rules. Bounds
/// start at -30 and grow by at most 60/n per rule, one sequence per rule
/// family, rounded to three decimals.
std::string gen_t4(int n, std::uint64_t seed);

/// The blood-pressure program with n people.
std::string gen_t5(int n);

/// Query atom of every generated family.
std::string bench_query(const std::string& dataset);

} // namespace hpasp
