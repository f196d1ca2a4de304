#include "ldips/interp.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "ldips/errors.hpp"
#include "ldips/printer.hpp"

namespace ldips {

namespace {

Value eval_at(const Expr& e, const WorldState& w, const OpRegistry& ops,
              const std::vector<std::pair<std::string, Value>>* holes) {
    switch (e.kind()) {
    case ExprKind::Var: {
        auto it = w.bindings.find(e.name());
        if (it == w.bindings.end()) throw EvalError(EvalError::Kind::UnboundInput, "unbound input '" + e.name() + "'");
        return it->second;
    }
    case ExprKind::Const:
        return e.value();
    case ExprKind::Hole: {
        if (holes)
            for (const auto& [name, v] : *holes)
                if (name == e.name()) return v;
        throw EvalError(EvalError::Kind::UnfilledHole, "unfilled hole '?" + e.name() + "'");
    }
    case ExprKind::Unary:
    case ExprKind::Binary: {
        const OpSignature* op = ops.find(e.name());
        if (!op) throw EvalError(EvalError::Kind::Arity, "unknown operator '" + e.name() + "'");
        const std::size_t n = e.args().size();
        if (static_cast<int>(n) != op->arity)
            throw EvalError(EvalError::Kind::Arity, "operator '" + e.name() + "' applied to wrong arity");
        std::array<Value, 2> args{};
        for (std::size_t i = 0; i < n; ++i) args[i] = eval_at(e.args()[i], w, ops, holes);
        std::optional<Value> r = op->eval(std::span<const Value>(args.data(), n));
        if (!r) {
            if (e.name() == "/") throw EvalError(EvalError::Kind::DivisionByZero, "division by zero");
            throw EvalError(EvalError::Kind::NonFinite, "operator '" + e.name() + "' produced a non-finite value");
        }
        return *r;
    }
    }
    throw EvalError(EvalError::Kind::Arity, "malformed expression");
}

bool action_matches(const ActionRef& a, const ActionRef& b, const WorldState& w) {
    const std::string& x = a.current ? w.start_action : a.name;
    const std::string& y = b.current ? w.start_action : b.name;
    return x == y;
}

}  // namespace

Value eval_expr(const Expr& e, const WorldState& w, const OpRegistry& ops) { return eval_at(e, w, ops, nullptr); }

bool eval_pred(const Pred& p, const WorldState& w, const OpRegistry& ops) {
    switch (p.kind()) {
    case PredKind::True:
        return true;
    case PredKind::False:
        return false;
    case PredKind::ActionEq:
        return action_matches(p.action_lhs(), p.action_rhs(), w);
    case PredKind::Lt:
    case PredKind::Gt: {
        const Threshold& t = p.threshold();
        if (t.is_hole) throw EvalError(EvalError::Kind::UnfilledHole, "unfilled parameter '?" + t.name + "'");
        const double v = eval_at(p.expr(), w, ops, nullptr).x;
        return p.kind() == PredKind::Lt ? v < t.value : v > t.value;
    }
    case PredKind::And:
        return eval_pred(p.lhs(), w, ops) && eval_pred(p.rhs(), w, ops);
    case PredKind::Or:
        return eval_pred(p.lhs(), w, ops) || eval_pred(p.rhs(), w, ops);
    case PredKind::Hole:
        throw EvalError(EvalError::Kind::UnfilledHole, "unfilled predicate '?" + p.hole_id() + "'");
    }
    return false;
}

std::string eval_policy(const Policy& p, const WorldState& w, const OpRegistry& ops) {
    for (const Branch& b : p.branches)
        if (eval_pred(b.guard, w, ops)) return b.action;
    return p.fallback;
}

ResidualPred ResidualPred::negate(ResidualPred p) {
    if (p.kind == Kind::True) return literal(false);
    if (p.kind == Kind::False) return literal(true);
    if (p.kind == Kind::Not) return std::move(p.children[0]);
    ResidualPred n{Kind::Not, 0.0, Rel::Lt, {}, {}};
    n.children.push_back(std::move(p));
    return n;
}

ResidualPred ResidualPred::all(std::vector<ResidualPred> parts) {
    ResidualPred r{Kind::And, 0.0, Rel::Lt, {}, {}};
    for (ResidualPred& q : parts) {
        if (q.kind == Kind::False) return literal(false);
        if (q.kind == Kind::True) continue;
        if (q.kind == Kind::And)
            for (ResidualPred& c : q.children) r.children.push_back(std::move(c));
        else
            r.children.push_back(std::move(q));
    }
    if (r.children.empty()) return literal(true);
    if (r.children.size() == 1) return std::move(r.children[0]);
    return r;
}

ResidualPred ResidualPred::any(std::vector<ResidualPred> parts) {
    ResidualPred r{Kind::Or, 0.0, Rel::Lt, {}, {}};
    for (ResidualPred& q : parts) {
        if (q.kind == Kind::True) return literal(true);
        if (q.kind == Kind::False) continue;
        if (q.kind == Kind::Or)
            for (ResidualPred& c : q.children) r.children.push_back(std::move(c));
        else
            r.children.push_back(std::move(q));
    }
    if (r.children.empty()) return literal(false);
    if (r.children.size() == 1) return std::move(r.children[0]);
    return r;
}

bool ResidualPred::holds(const std::map<std::string, double>& values) const {
    switch (kind) {
    case Kind::True:
        return true;
    case Kind::False:
        return false;
    case Kind::Atom: {
        auto it = values.find(param);
        if (it == values.end()) throw EvalError(EvalError::Kind::UnfilledHole, "no value for '?" + param + "'");
        return rel == Rel::Lt ? constant < it->second : constant > it->second;
    }
    case Kind::And:
        for (const ResidualPred& c : children)
            if (!c.holds(values)) return false;
        return true;
    case Kind::Or:
        for (const ResidualPred& c : children)
            if (c.holds(values)) return true;
        return false;
    case Kind::Not:
        return !children[0].holds(values);
    }
    return false;
}

std::string to_string(const ResidualPred& r) {
    using K = ResidualPred::Kind;
    switch (r.kind) {
    case K::True:
        return "true";
    case K::False:
        return "false";
    case K::Atom:
        return format_number(r.constant) + (r.rel == ResidualPred::Rel::Lt ? " < ?" : " > ?") + r.param;
    case K::Not:
        return "!(" + to_string(r.children[0]) + ")";
    case K::And:
    case K::Or: {
        std::string s = "(";
        for (std::size_t i = 0; i < r.children.size(); ++i) {
            if (i) s += r.kind == K::And ? " && " : " || ";
            s += to_string(r.children[i]);
        }
        return s + ")";
    }
    }
    return {};
}

namespace {

ResidualPred peval(const Pred& p, const WorldState& w, const PartialEvalOptions& o, const OpRegistry& ops) {
    switch (p.kind()) {
    case PredKind::True:
        return ResidualPred::literal(true);
    case PredKind::False:
        return ResidualPred::literal(false);
    case PredKind::ActionEq:
        return ResidualPred::literal(action_matches(p.action_lhs(), p.action_rhs(), w));
    case PredKind::Lt:
    case PredKind::Gt: {
        const double v = eval_at(p.expr(), w, ops, o.expr_values).x;
        const Threshold& t = p.threshold();
        const auto rel = p.kind() == PredKind::Lt ? ResidualPred::Rel::Lt : ResidualPred::Rel::Gt;
        if (t.is_hole) return ResidualPred::atom(v, rel, t.name);
        if (o.adjust_params) return ResidualPred::atom(v - t.value, rel, t.name);
        return ResidualPred::literal(p.kind() == PredKind::Lt ? v < t.value : v > t.value);
    }
    case PredKind::And: {
        ResidualPred l = peval(p.lhs(), w, o, ops);
        if (l.is_false()) return l;
        std::vector<ResidualPred> parts;
        parts.push_back(std::move(l));
        parts.push_back(peval(p.rhs(), w, o, ops));
        return ResidualPred::all(std::move(parts));
    }
    case PredKind::Or: {
        ResidualPred l = peval(p.lhs(), w, o, ops);
        if (l.is_true()) return l;
        std::vector<ResidualPred> parts;
        parts.push_back(std::move(l));
        parts.push_back(peval(p.rhs(), w, o, ops));
        return ResidualPred::any(std::move(parts));
    }
    case PredKind::Hole:
        throw EvalError(EvalError::Kind::UnfilledHole, "unfilled predicate '?" + p.hole_id() + "'");
    }
    return ResidualPred::literal(false);
}

}  // namespace

ResidualPred partial_eval(const Pred& b, const WorldState& w, const PartialEvalOptions& opts) {
    return peval(b, w, opts, opts.ops ? *opts.ops : builtin_registry());
}

}  // namespace ldips
