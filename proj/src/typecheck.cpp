#include "ldips/typecheck.hpp"

#include <algorithm>
#include <array>

#include "ldips/errors.hpp"

namespace ldips {

bool DomainDef::has_action(const std::string& a) const {
    return std::find(actions.begin(), actions.end(), a) != actions.end();
}

const InputDecl* DomainDef::find_input(const std::string& n) const {
    for (const InputDecl& d : inputs)
        if (d.name == n) return &d;
    return nullptr;
}

const InputDecl* TypeEnv::find_input(const std::string& n) const {
    for (const InputDecl& d : inputs)
        if (d.name == n) return &d;
    return nullptr;
}

bool TypeEnv::has_action(const std::string& a) const {
    return std::find(actions.begin(), actions.end(), a) != actions.end();
}

TypeEnv make_env(const DomainDef& domain, const OpRegistry& registry) {
    TypeEnv env;
    env.inputs = domain.inputs;
    env.ops = registry.subset(domain.operators);
    env.actions = domain.actions;
    env.constants = domain.constants;
    return env;
}

namespace {

ValueType check_at(const Expr& e, const TypeEnv& env, std::vector<std::size_t>& path) {
    switch (e.kind()) {
    case ExprKind::Var: {
        const InputDecl* in = env.find_input(e.name());
        if (!in) throw TypeError(TypeError::Kind::UnknownVariable, path, "unknown variable '" + e.name() + "'");
        return in->type;
    }
    case ExprKind::Const:
        return *e.declared_type();
    case ExprKind::Hole:
        if (!e.declared_type())
            throw TypeError(TypeError::Kind::UntypedHole, path,
                            "untyped hole '?" + e.name() + "' outside a comparison");
        return *e.declared_type();
    case ExprKind::Unary:
    case ExprKind::Binary: {
        const OpSignature* op = env.ops.find(e.name());
        if (!op) throw TypeError(TypeError::Kind::UnknownOperator, path, "unknown operator '" + e.name() + "'");
        std::array<ValueType, 2> arg_types{};
        const std::size_t n = e.args().size();
        for (std::size_t i = 0; i < n; ++i) {
            path.push_back(i);
            arg_types[i] = check_at(e.args()[i], env, path);
            path.pop_back();
        }
        std::span<const ValueType> types(arg_types.data(), n);
        if (auto r = op->type_rule(types)) return *r;
        // Distinguish commensurability failures from shape failures; a unary
        // operator rejecting a dimension is a domain error.
        if (n > 1 && op->shape_rule(types))
            throw TypeError(TypeError::Kind::IncommensurableOperands, path,
                            "operator '" + e.name() + "' rejects dimensions " + to_string(arg_types[0]) +
                                (n > 1 ? ", " + to_string(arg_types[1]) : ""));
        throw TypeError(TypeError::Kind::OperatorDomain, path,
                        "operator '" + e.name() + "' not defined on " + to_string(arg_types[0]) +
                            (n > 1 ? ", " + to_string(arg_types[1]) : ""));
    }
    }
    throw TypeError(TypeError::Kind::OperatorDomain, path, "malformed expression");
}

void check_action(const ActionRef& a, const TypeEnv& env, const std::vector<std::size_t>& path) {
    if (!a.current && !env.has_action(a.name))
        throw TypeError(TypeError::Kind::UnknownAction, path, "unknown action '" + a.name + "'");
}

void check_pred_at(const Pred& p, const TypeEnv& env, std::vector<std::size_t>& path) {
    switch (p.kind()) {
    case PredKind::ActionEq:
        check_action(p.action_lhs(), env, path);
        check_action(p.action_rhs(), env, path);
        return;
    case PredKind::Lt:
    case PredKind::Gt: {
        const Expr& e = p.expr();
        path.push_back(0);
        if (e.kind() == ExprKind::Hole && !e.declared_type()) {
            path.pop_back();
            return;  // any scalar; threshold dimension follows the filling
        }
        ValueType t = check_at(e, env, path);
        path.pop_back();
        if (!t.is_scalar())
            throw TypeError(TypeError::Kind::OperatorDomain, path, "comparison on non-scalar " + to_string(t));
        const Threshold& th = p.threshold();
        if (th.dim && *th.dim != t.dim)
            throw TypeError(TypeError::Kind::ComparisonDimensionMismatch, path,
                            "comparing " + to_string(t) + " against threshold of dimension " + to_string(*th.dim));
        return;
    }
    case PredKind::And:
    case PredKind::Or:
        path.push_back(0);
        check_pred_at(p.lhs(), env, path);
        path.back() = 1;
        check_pred_at(p.rhs(), env, path);
        path.pop_back();
        return;
    default:
        return;
    }
}

}  // namespace

ValueType check_expr(const Expr& e, const TypeEnv& env) {
    std::vector<std::size_t> path;
    return check_at(e, env, path);
}

void check_pred(const Pred& p, const TypeEnv& env) {
    std::vector<std::size_t> path;
    check_pred_at(p, env, path);
}

void check_policy(const Policy& p, const TypeEnv& env) {
    std::vector<std::size_t> path;
    for (std::size_t i = 0; i < p.branches.size(); ++i) {
        path.assign(1, i);
        check_pred_at(p.branches[i].guard, env, path);
        if (!env.has_action(p.branches[i].action))
            throw TypeError(TypeError::Kind::UnknownAction, path, "unknown action '" + p.branches[i].action + "'");
    }
    if (!env.has_action(p.fallback))
        throw TypeError(TypeError::Kind::UnknownAction, {}, "unknown action '" + p.fallback + "'");
}

}  // namespace ldips
