#pragma once

// Brute-force reference for feature enumeration: every expression up to a
// height, no pruning of any kind, values computed by the interpreter.

#include <cmath>
#include <vector>

#include "ldips/ast.hpp"
#include "ldips/domain.hpp"
#include "ldips/errors.hpp"
#include "ldips/interp.hpp"

namespace testing_support {

struct NaiveExpr {
    ldips::Expr expr;
    ldips::ValueType type;
};

// With `dimensions`, operators apply only where their dimensional rule
// accepts; otherwise only the shape rule is consulted.
inline std::vector<NaiveExpr> naive_enumerate(const ldips::TypeEnv& env, int max_depth, bool dimensions) {
    std::vector<std::vector<NaiveExpr>> by_height(static_cast<std::size_t>(std::max(max_depth, 0)) + 1);
    if (max_depth < 1) return {};
    for (const auto& in : env.inputs) by_height[1].push_back({ldips::Expr::var(in.name, in.type), in.type});
    for (const auto& c : env.constants) {
        ldips::ValueType t = ldips::ValueType::scalar(c.dim);
        by_height[1].push_back({ldips::Expr::constant(ldips::Value::scalar(c.value), t), t});
    }
    for (int h = 2; h <= max_depth; ++h) {
        std::vector<NaiveExpr> lower;
        for (int k = 1; k < h; ++k) lower.insert(lower.end(), by_height[k].begin(), by_height[k].end());
        const std::vector<NaiveExpr>& top = by_height[h - 1];
        for (const auto& op : env.ops.ops()) {
            const auto& rule = dimensions ? op.type_rule : op.shape_rule;
            if (op.arity == 1) {
                for (const NaiveExpr& a : top) {
                    std::vector<ldips::ValueType> ts{a.type};
                    if (auto t = rule(ts)) by_height[h].push_back({ldips::Expr::unary(op.name, a.expr), *t});
                }
                continue;
            }
            for (const NaiveExpr& a : lower) {
                for (const NaiveExpr& b : lower) {
                    if (a.expr.height() != static_cast<std::size_t>(h - 1) &&
                        b.expr.height() != static_cast<std::size_t>(h - 1))
                        continue;
                    std::vector<ldips::ValueType> ts{a.type, b.type};
                    if (auto t = rule(ts)) by_height[h].push_back({ldips::Expr::binary(op.name, a.expr, b.expr), *t});
                }
            }
        }
    }
    std::vector<NaiveExpr> out;
    for (const auto& level : by_height) out.insert(out.end(), level.begin(), level.end());
    return out;
}

struct NaiveSig {
    std::vector<bool> error;
    std::vector<ldips::Value> values;
};

inline NaiveSig naive_signature(const ldips::Expr& e, const std::vector<ldips::WorldState>& worlds) {
    NaiveSig s;
    for (const auto& w : worlds) {
        try {
            s.values.push_back(ldips::eval_expr(e, w));
            s.error.push_back(false);
        } catch (const ldips::EvalError&) {
            s.values.push_back({});
            s.error.push_back(true);
        }
    }
    return s;
}

inline bool naive_equal(const NaiveSig& a, const NaiveSig& b, double tol) {
    if (a.error != b.error) return false;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        if (a.error[i]) continue;
        if (a.values[i].is_vector != b.values[i].is_vector) return false;
        if (std::fabs(a.values[i].x - b.values[i].x) > tol) return false;
        if (std::fabs(a.values[i].y - b.values[i].y) > tol) return false;
    }
    return true;
}

}  // namespace testing_support
