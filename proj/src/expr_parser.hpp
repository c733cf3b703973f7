#pragma once

#include <string>
#include <vector>

#include "lexer.hpp"
#include "narep/expr.hpp"

namespace narep::detail {

/// Parses one expression from `ts`, stopping at the first token that cannot
/// continue it. `bound` holds comprehension variables in scope.
Expr parse_expression(TokenStream& ts, std::vector<std::string>& bound);

/// Parses `P`, `P[i]` ... for the left-hand side of an update.
Expr parse_place_target(TokenStream& ts, std::vector<std::string>& bound);

bool is_reserved_word(std::string_view word);

}  // namespace narep::detail
