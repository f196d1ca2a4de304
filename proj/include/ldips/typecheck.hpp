#pragma once

#include "ldips/ast.hpp"
#include "ldips/domain.hpp"

namespace ldips {

// Returns the unique type of a hole-free or typed-hole expression. Throws
// TypeError carrying the child-index path to the offending subterm.
ValueType check_expr(const Expr& e, const TypeEnv& env);

void check_pred(const Pred& p, const TypeEnv& env);
void check_policy(const Policy& p, const TypeEnv& env);

}  // namespace ldips
