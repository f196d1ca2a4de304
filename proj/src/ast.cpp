#include "ldips/ast.hpp"

#include <algorithm>
#include <cassert>

namespace ldips {

Expr Expr::var(std::string name, ValueType type) {
    return Expr(std::make_shared<const ExprNode>(
        ExprNode{ExprKind::Var, std::move(name), {}, type, {}}));
}

Expr Expr::constant(Value value, ValueType type) {
    return Expr(std::make_shared<const ExprNode>(ExprNode{ExprKind::Const, {}, value, type, {}}));
}

Expr Expr::unary(std::string op, Expr arg) {
    return Expr(std::make_shared<const ExprNode>(
        ExprNode{ExprKind::Unary, std::move(op), {}, std::nullopt, {std::move(arg)}}));
}

Expr Expr::binary(std::string op, Expr lhs, Expr rhs) {
    return Expr(std::make_shared<const ExprNode>(ExprNode{
        ExprKind::Binary, std::move(op), {}, std::nullopt, {std::move(lhs), std::move(rhs)}}));
}

Expr Expr::hole(std::string id, std::optional<ValueType> type) {
    return Expr(
        std::make_shared<const ExprNode>(ExprNode{ExprKind::Hole, std::move(id), {}, type, {}}));
}

ExprKind Expr::kind() const { return node_->kind; }
const std::string& Expr::name() const { return node_->name; }
const Value& Expr::value() const { return node_->value; }
const std::optional<ValueType>& Expr::declared_type() const { return node_->type; }
const std::vector<Expr>& Expr::args() const { return node_->args; }

std::size_t Expr::height() const {
    std::size_t h = 0;
    for (const Expr& a : node_->args) h = std::max(h, a.height());
    return h + 1;
}

bool Expr::has_holes() const {
    if (node_->kind == ExprKind::Hole) return true;
    return std::any_of(node_->args.begin(), node_->args.end(),
                       [](const Expr& a) { return a.has_holes(); });
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    if (!a.node_ || !b.node_) return false;
    const ExprNode& x = *a.node_;
    const ExprNode& y = *b.node_;
    return x.kind == y.kind && x.name == y.name && x.value == y.value && x.type == y.type &&
           x.args == y.args;
}

Pred Pred::truth(bool value) {
    PredNode n{};
    n.kind = value ? PredKind::True : PredKind::False;
    return Pred(std::make_shared<const PredNode>(std::move(n)));
}

Pred Pred::action_eq(ActionRef lhs, ActionRef rhs) {
    PredNode n{};
    n.kind = PredKind::ActionEq;
    n.a = std::move(lhs);
    n.b = std::move(rhs);
    return Pred(std::make_shared<const PredNode>(std::move(n)));
}

Pred Pred::lt(Expr e, Threshold t) {
    PredNode n{};
    n.kind = PredKind::Lt;
    n.expr = std::move(e);
    n.threshold = std::move(t);
    return Pred(std::make_shared<const PredNode>(std::move(n)));
}

Pred Pred::gt(Expr e, Threshold t) {
    PredNode n{};
    n.kind = PredKind::Gt;
    n.expr = std::move(e);
    n.threshold = std::move(t);
    return Pred(std::make_shared<const PredNode>(std::move(n)));
}

Pred Pred::conj(Pred lhs, Pred rhs) {
    PredNode n{};
    n.kind = PredKind::And;
    n.lhs = std::move(lhs);
    n.rhs = std::move(rhs);
    return Pred(std::make_shared<const PredNode>(std::move(n)));
}

Pred Pred::disj(Pred lhs, Pred rhs) {
    PredNode n{};
    n.kind = PredKind::Or;
    n.lhs = std::move(lhs);
    n.rhs = std::move(rhs);
    return Pred(std::make_shared<const PredNode>(std::move(n)));
}

Pred Pred::hole(std::string id) {
    PredNode n{};
    n.kind = PredKind::Hole;
    n.hole = std::move(id);
    return Pred(std::make_shared<const PredNode>(std::move(n)));
}

PredKind Pred::kind() const { return node_->kind; }
const ActionRef& Pred::action_lhs() const { return node_->a; }
const ActionRef& Pred::action_rhs() const { return node_->b; }
const Expr& Pred::expr() const { return node_->expr; }
const Threshold& Pred::threshold() const { return node_->threshold; }
const Pred& Pred::lhs() const { return node_->lhs; }
const Pred& Pred::rhs() const { return node_->rhs; }
const std::string& Pred::hole_id() const { return node_->hole; }

std::size_t Pred::atom_count() const {
    switch (kind()) {
    case PredKind::And:
    case PredKind::Or:
        return lhs().atom_count() + rhs().atom_count();
    default:
        return 1;
    }
}

bool operator==(const Pred& a, const Pred& b) {
    if (a.node_ == b.node_) return true;
    if (!a.node_ || !b.node_) return false;
    const PredNode& x = *a.node_;
    const PredNode& y = *b.node_;
    if (x.kind != y.kind) return false;
    switch (x.kind) {
    case PredKind::True:
    case PredKind::False:
        return true;
    case PredKind::ActionEq:
        return x.a == y.a && x.b == y.b;
    case PredKind::Lt:
    case PredKind::Gt:
        return x.expr == y.expr && x.threshold == y.threshold;
    case PredKind::And:
    case PredKind::Or:
        return x.lhs == y.lhs && x.rhs == y.rhs;
    case PredKind::Hole:
        return x.hole == y.hole;
    }
    return false;
}

void collect_holes(const Expr& e, HoleSet& out) {
    if (e.kind() == ExprKind::Hole) {
        out.exprs.push_back({e.name(), e.declared_type()});
        return;
    }
    for (const Expr& a : e.args()) collect_holes(a, out);
}

namespace {

void collect_pred_holes(const Pred& p, HoleSet& out) {
    switch (p.kind()) {
    case PredKind::Lt:
    case PredKind::Gt:
        collect_holes(p.expr(), out);
        if (p.threshold().is_hole) out.params.push_back({p.threshold().name, p.threshold().dim});
        break;
    case PredKind::And:
    case PredKind::Or:
        collect_pred_holes(p.lhs(), out);
        collect_pred_holes(p.rhs(), out);
        break;
    case PredKind::Hole:
        out.preds.push_back(p.hole_id());
        break;
    default:
        break;
    }
}

bool expr_has_holes(const Expr& e) { return e.has_holes(); }

}  // namespace

HoleSet collect_holes(const Pred& p) {
    HoleSet out;
    collect_pred_holes(p, out);
    return out;
}

HoleSet collect_holes(const Policy& p) {
    HoleSet out;
    for (const Branch& b : p.branches) collect_pred_holes(b.guard, out);
    return out;
}

bool has_holes(const Pred& p) {
    switch (p.kind()) {
    case PredKind::Lt:
    case PredKind::Gt:
        return p.threshold().is_hole || expr_has_holes(p.expr());
    case PredKind::And:
    case PredKind::Or:
        return has_holes(p.lhs()) || has_holes(p.rhs());
    case PredKind::Hole:
        return true;
    default:
        return false;
    }
}

bool has_holes(const Policy& p) {
    return std::any_of(p.branches.begin(), p.branches.end(),
                       [](const Branch& b) { return has_holes(b.guard); });
}

namespace {

Pred renumber(const Pred& p, int& next) {
    switch (p.kind()) {
    case PredKind::Lt:
    case PredKind::Gt: {
        Threshold t = p.threshold();
        if (!t.is_hole) t.name = "t" + std::to_string(next++);
        return p.kind() == PredKind::Lt ? Pred::lt(p.expr(), t) : Pred::gt(p.expr(), t);
    }
    case PredKind::And: {
        Pred l = renumber(p.lhs(), next);
        return Pred::conj(l, renumber(p.rhs(), next));
    }
    case PredKind::Or: {
        Pred l = renumber(p.lhs(), next);
        return Pred::disj(l, renumber(p.rhs(), next));
    }
    default:
        return p;
    }
}

}  // namespace

Policy number_params(const Policy& p) {
    Policy out;
    out.fallback = p.fallback;
    int next = 1;
    for (const Branch& b : p.branches) out.branches.push_back({renumber(b.guard, next), b.action});
    return out;
}

Pred replace_pred_hole(const Pred& p, const std::string& id, const Pred& with) {
    switch (p.kind()) {
    case PredKind::Hole:
        return p.hole_id() == id ? with : p;
    case PredKind::And:
        return Pred::conj(replace_pred_hole(p.lhs(), id, with), replace_pred_hole(p.rhs(), id, with));
    case PredKind::Or:
        return Pred::disj(replace_pred_hole(p.lhs(), id, with), replace_pred_hole(p.rhs(), id, with));
    default:
        return p;
    }
}

namespace {

const ExprFill* find_fill(const std::vector<ExprFill>& fills, const std::string& id) {
    for (const ExprFill& f : fills)
        if (f.hole == id) return &f;
    return nullptr;
}

Expr fill_expr(const Expr& e, const std::vector<ExprFill>& fills) {
    switch (e.kind()) {
    case ExprKind::Hole: {
        const ExprFill* f = find_fill(fills, e.name());
        return f ? f->expr : e;
    }
    case ExprKind::Unary:
        return Expr::unary(e.name(), fill_expr(e.args()[0], fills));
    case ExprKind::Binary:
        return Expr::binary(e.name(), fill_expr(e.args()[0], fills), fill_expr(e.args()[1], fills));
    default:
        return e;
    }
}

}  // namespace

Pred fill_expr_holes(const Pred& p, const std::vector<ExprFill>& fills) {
    switch (p.kind()) {
    case PredKind::Lt:
    case PredKind::Gt: {
        Threshold t = p.threshold();
        if (p.expr().kind() == ExprKind::Hole && !t.dim) {
            if (const ExprFill* f = find_fill(fills, p.expr().name())) t.dim = f->type.dim;
        }
        Expr e = fill_expr(p.expr(), fills);
        return p.kind() == PredKind::Lt ? Pred::lt(e, t) : Pred::gt(e, t);
    }
    case PredKind::And:
        return Pred::conj(fill_expr_holes(p.lhs(), fills), fill_expr_holes(p.rhs(), fills));
    case PredKind::Or:
        return Pred::disj(fill_expr_holes(p.lhs(), fills), fill_expr_holes(p.rhs(), fills));
    default:
        return p;
    }
}

Pred fill_params(const Pred& p, const std::vector<std::pair<std::string, double>>& values) {
    switch (p.kind()) {
    case PredKind::Lt:
    case PredKind::Gt: {
        Threshold t = p.threshold();
        if (t.is_hole) {
            for (const auto& [name, v] : values) {
                if (name == t.name) {
                    t = Threshold::param(name, v, t.dim);
                    break;
                }
            }
        }
        return p.kind() == PredKind::Lt ? Pred::lt(p.expr(), t) : Pred::gt(p.expr(), t);
    }
    case PredKind::And:
        return Pred::conj(fill_params(p.lhs(), values), fill_params(p.rhs(), values));
    case PredKind::Or:
        return Pred::disj(fill_params(p.lhs(), values), fill_params(p.rhs(), values));
    default:
        return p;
    }
}

}  // namespace ldips
