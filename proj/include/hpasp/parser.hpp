#pragma once

#include <string_view>
#include <vector>

#include "hpasp/ast.hpp"

namespace hpasp {

struct ParseOptions {
  GaussianParam gaussian_param = GaussianParam::StdDev;
  /// Accept identifiers with the reserved `__` prefix. Only set this when
  /// reading back programs this library printed itself.
  bool allow_reserved = false;
};

/// Parses program text. Ranges such as `p(1..4)` are left unexpanded.
/// Throws Error(Syntax) with line/column, or Error(DuplicateDeclaration).
HybridProgram parse_program(std::string_view text, const ParseOptions& options = {});

/// Parses a single atom such as `q0` or `prob(3)`.
Atom parse_atom(std::string_view text, const ParseOptions& options = {});

/// Parses a comma separated conjunction of body elements, e.g.
/// `b, not c, above(a,0.6)`. Used for queries and evidence.
std::vector<BodyElement> parse_conjunction(std::string_view text, const ParseOptions& options = {});

} // namespace hpasp
