#pragma once

#include <string_view>

#include "ldips/ast.hpp"
#include "ldips/domain.hpp"

namespace ldips {

// Grammar (whitespace and newlines are insignificant):
//
//   policy  := 'return' ACTION
//            | 'if' '(' pred ')' ':' ['return'] ACTION
//              { ('elif' | 'else' 'if') '(' pred ')' ':' ['return'] ACTION }
//              'else' ':' ['return'] ACTION
//   pred    := conj { '||' conj }
//   conj    := atom { '&&' atom }
//   atom    := 'true' | 'false' | '(' pred ')' | ACTREF '==' ACTREF
//            | '?' ID                      (blank predicate)
//            | expr ('<' | '>') threshold
//   thresh  := NUMBER [':' DIM] | '?' ID [':' DIM]
//   expr    := term { ('+' | '-') term }
//   term    := unary { ('*' | '/') unary }
//   unary   := '-' NUMBER [':' DIM] | primary
//   primary := NUMBER [':' DIM] | '<' NUM ',' NUM '>' [':' DIM]
//            | ID '(' expr [',' expr] ')' | ID | '?' ID [':' TYPE] | '(' expr ')'
//   DIM     := '[' INT ',' INT ',' INT ']'      TYPE := DIM | 'V' DIM
//
// `a_s` is the current action. Thresholds without an annotation take the
// dimension of the expression they are compared against. Concrete parameters
// are named t1, t2, ... in textual order.
Policy parse_policy(std::string_view text, const TypeEnv& env);
Policy parse_policy(std::string_view text, const DomainDef& domain);

Pred parse_pred(std::string_view text, const TypeEnv& env);
Expr parse_expr(std::string_view text, const TypeEnv& env);

}  // namespace ldips
