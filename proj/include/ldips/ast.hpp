#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ldips/dimension.hpp"

namespace ldips {

// A runtime value: a scalar (uses x) or a planar vector.
struct Value {
    bool is_vector = false;
    double x = 0.0;
    double y = 0.0;

    static Value scalar(double v) { return {false, v, 0.0}; }
    static Value vec(double vx, double vy) { return {true, vx, vy}; }

    friend bool operator==(const Value&, const Value&) = default;
};

enum class ExprKind { Var, Const, Unary, Binary, Hole };

struct ExprNode;

// Immutable, shareable expression tree.
class Expr {
public:
    Expr() = default;

    static Expr var(std::string name, ValueType type);
    static Expr constant(Value value, ValueType type);
    static Expr unary(std::string op, Expr arg);
    static Expr binary(std::string op, Expr lhs, Expr rhs);
    // A hole without a type stands for "any scalar"; only legal as the direct
    // left side of a comparison.
    static Expr hole(std::string id, std::optional<ValueType> type = std::nullopt);

    ExprKind kind() const;
    const std::string& name() const;  // variable name, operator name or hole id
    const Value& value() const;
    const std::optional<ValueType>& declared_type() const;  // Var, Const, Hole
    const std::vector<Expr>& args() const;

    bool valid() const { return node_ != nullptr; }
    std::size_t height() const;
    bool has_holes() const;

    friend bool operator==(const Expr& a, const Expr& b);

private:
    explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
    std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
    ExprKind kind;
    std::string name;
    Value value;
    std::optional<ValueType> type;
    std::vector<Expr> args;
};

// Right-hand side of a comparison: a concrete parameter or a blank one. The
// dimension is unknown only when the compared expression is an untyped hole.
struct Threshold {
    bool is_hole = false;
    std::string name;
    double value = 0.0;
    std::optional<Dimension> dim;

    static Threshold param(std::string name, double value, std::optional<Dimension> dim) {
        return {false, std::move(name), value, dim};
    }
    static Threshold hole(std::string name, std::optional<Dimension> dim) {
        return {true, std::move(name), 0.0, dim};
    }

    friend bool operator==(const Threshold&, const Threshold&) = default;
};

// Either the reserved current action `a_s` or a named domain action.
struct ActionRef {
    bool current = false;
    std::string name;

    static ActionRef start() { return {true, {}}; }
    static ActionRef named(std::string n) { return {false, std::move(n)}; }

    friend bool operator==(const ActionRef&, const ActionRef&) = default;
};

enum class PredKind { True, False, ActionEq, Lt, Gt, And, Or, Hole };

struct PredNode;

class Pred {
public:
    Pred() = default;

    static Pred truth(bool value);
    static Pred action_eq(ActionRef lhs, ActionRef rhs);
    static Pred lt(Expr e, Threshold t);
    static Pred gt(Expr e, Threshold t);
    static Pred conj(Pred lhs, Pred rhs);
    static Pred disj(Pred lhs, Pred rhs);
    static Pred hole(std::string id);

    PredKind kind() const;
    const ActionRef& action_lhs() const;
    const ActionRef& action_rhs() const;
    const Expr& expr() const;
    const Threshold& threshold() const;
    const Pred& lhs() const;
    const Pred& rhs() const;
    const std::string& hole_id() const;

    bool valid() const { return node_ != nullptr; }
    bool is_comparison() const { return kind() == PredKind::Lt || kind() == PredKind::Gt; }
    std::size_t atom_count() const;

    friend bool operator==(const Pred& a, const Pred& b);

private:
    explicit Pred(std::shared_ptr<const PredNode> node) : node_(std::move(node)) {}
    std::shared_ptr<const PredNode> node_;
};

struct PredNode {
    PredKind kind;
    ActionRef a;
    ActionRef b;
    Expr expr;
    Threshold threshold;
    Pred lhs;
    Pred rhs;
    std::string hole;
};

struct Branch {
    Pred guard;
    std::string action;

    friend bool operator==(const Branch&, const Branch&) = default;
};

// Decision list: the first branch whose guard holds wins, else the fallback.
struct Policy {
    std::vector<Branch> branches;
    std::string fallback;

    friend bool operator==(const Policy&, const Policy&) = default;
};

struct ParamHoleInfo {
    std::string name;
    std::optional<Dimension> dim;
    friend bool operator==(const ParamHoleInfo&, const ParamHoleInfo&) = default;
};

struct ExprHoleInfo {
    std::string name;
    std::optional<ValueType> type;
    friend bool operator==(const ExprHoleInfo&, const ExprHoleInfo&) = default;
};

struct HoleSet {
    std::vector<ParamHoleInfo> params;
    std::vector<ExprHoleInfo> exprs;
    std::vector<std::string> preds;

    bool empty() const { return params.empty() && exprs.empty() && preds.empty(); }
};

// Holes in first textual occurrence order.
HoleSet collect_holes(const Policy& p);
HoleSet collect_holes(const Pred& p);
void collect_holes(const Expr& e, HoleSet& out);

bool has_holes(const Pred& p);
bool has_holes(const Policy& p);

// Renames every concrete parameter to t1, t2, ... in textual order. Parsed
// policies are always numbered this way, so programmatically built policies
// must be renumbered to round-trip.
Policy number_params(const Policy& p);

// Structural rewrites used by synthesis.
Pred replace_pred_hole(const Pred& p, const std::string& id, const Pred& with);
struct ExprFill {
    std::string hole;
    Expr expr;
    ValueType type;
};
// Substitutes expression holes; an untyped threshold next to a filled hole
// takes the filling expression's dimension.
Pred fill_expr_holes(const Pred& p, const std::vector<ExprFill>& fills);
Pred fill_params(const Pred& p, const std::vector<std::pair<std::string, double>>& values);

}  // namespace ldips
