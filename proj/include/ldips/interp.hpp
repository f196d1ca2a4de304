#pragma once

#include <map>
#include <string>
#include <vector>

#include "ldips/ast.hpp"
#include "ldips/operators.hpp"

namespace ldips {

struct WorldState {
    std::string start_action;
    std::map<std::string, Value> bindings;

    friend bool operator==(const WorldState&, const WorldState&) = default;
};

struct Demonstration {
    std::string start_action;
    WorldState world;
    std::string next_action;

    friend bool operator==(const Demonstration&, const Demonstration&) = default;
};

// Evaluation uses the builtin registry unless one is given. Throws EvalError.
Value eval_expr(const Expr& e, const WorldState& w, const OpRegistry& ops = builtin_registry());
bool eval_pred(const Pred& p, const WorldState& w, const OpRegistry& ops = builtin_registry());
std::string eval_policy(const Policy& p, const WorldState& w, const OpRegistry& ops = builtin_registry());

// Boolean formula over atoms `constant REL param`.
struct ResidualPred {
    enum class Kind { True, False, Atom, And, Or, Not };
    enum class Rel { Lt, Gt };

    Kind kind = Kind::True;
    double constant = 0.0;
    Rel rel = Rel::Lt;
    std::string param;
    std::vector<ResidualPred> children;

    static ResidualPred literal(bool v) { return {v ? Kind::True : Kind::False, 0.0, Rel::Lt, {}, {}}; }
    static ResidualPred atom(double c, Rel r, std::string param) { return {Kind::Atom, c, r, std::move(param), {}}; }
    static ResidualPred negate(ResidualPred p);
    static ResidualPred all(std::vector<ResidualPred> parts);
    static ResidualPred any(std::vector<ResidualPred> parts);

    bool is_true() const { return kind == Kind::True; }
    bool is_false() const { return kind == Kind::False; }

    // Truth under a total assignment.
    bool holds(const std::map<std::string, double>& values) const;

    friend bool operator==(const ResidualPred&, const ResidualPred&) = default;
};

std::string to_string(const ResidualPred& r);

struct PartialEvalOptions {
    // Values of expression holes at this world, used instead of filling.
    const std::vector<std::pair<std::string, Value>>* expr_values = nullptr;
    // Treat every concrete threshold x as x + ?name; atoms then carry c - x.
    bool adjust_params = false;
    const OpRegistry* ops = nullptr;
};

ResidualPred partial_eval(const Pred& b, const WorldState& w, const PartialEvalOptions& opts = {});

}  // namespace ldips
