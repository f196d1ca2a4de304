#pragma once

#include <string>

#include "ldips/ast.hpp"
#include "ldips/operators.hpp"

namespace ldips {

// Shortest decimal text that reads back to the same binary64.
std::string format_number(double v);

// Operator notation comes from `ops`; unknown names print in prefix form.
std::string print_expr(const Expr& e, const OpRegistry& ops = builtin_registry());
std::string print_pred(const Pred& p, const OpRegistry& ops = builtin_registry());
std::string print_policy(const Policy& p, const OpRegistry& ops = builtin_registry());

}  // namespace ldips
