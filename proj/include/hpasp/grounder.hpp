#pragma once

#include <string_view>

#include "hpasp/ast.hpp"
#include "hpasp/parser.hpp"

namespace hpasp {

/// Replaces every ranged declaration or fact `a(l..u)` by the ground
/// instances a(l) ... a(u). Throws InvalidRange or DuplicateDeclaration.
HybridProgram expand_ranges(const HybridProgram& p);

/// Instantiates all logic variables. Variables are bound by joining positive
/// body literals against the atoms that can possibly become true, by matching
/// comparison atoms against declared continuous variables, and by ranging an
/// aggregate `= V` guard over the achievable counts. Integer comparisons are
/// decided here and disappear from the output. Aggregate elements are
/// instantiated into ground (tuple : condition) pairs.
/// Throws UnsafeRule, UnknownContinuousVariable, IllegalComparison.
HybridProgram ground(const HybridProgram& p);

/// Checks a ground program: no declared fact or continuous variable in a
/// head, continuous variables only inside comparison atoms, comparison bounds
/// are numeric constants with l < u for between/outside.
/// Throws HeadViolation, IllegalComparison, UnknownContinuousVariable, UnsafeRule.
const HybridProgram& validate(const HybridProgram& p);

/// parse + expand_ranges + ground + validate.
HybridProgram prepare(std::string_view text, const ParseOptions& options = {});

/// Evaluates integer/real arithmetic in a variable-free term.
Term evaluate_term(const Term& t);

} // namespace hpasp
