#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hpasp {

struct Location {
  int line = 0;
  int column = 0;
};

enum class ErrorKind {
  Syntax,
  DuplicateDeclaration,
  InvalidRange,
  UnsafeRule,
  UnknownContinuousVariable,
  HeadViolation,
  IllegalComparison,
  RecursiveAggregate,
  InvalidParameter,
  InvalidInterval,
  DegeneratePartition,
  BoundNotInPartition,
  EnumerationCapExceeded,
  WorldCapExceeded,
  AllWorldsInconsistent,
  UndefinedConditional,
  InvalidTolerance,
  InvalidSize,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

/// Every failure surfaced by the library. Limit errors (world or enumeration
/// caps) are distinguished so front ends can map them to a separate exit code.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message, Location loc = {});

  ErrorKind kind() const noexcept { return kind_; }
  const Location& location() const noexcept { return loc_; }
  bool is_limit() const noexcept {
    return kind_ == ErrorKind::EnumerationCapExceeded || kind_ == ErrorKind::WorldCapExceeded;
  }

private:
  ErrorKind kind_;
  Location loc_;
};

} // namespace hpasp
