#include "ldips/printer.hpp"

#include <charconv>
#include <sstream>

namespace ldips {

std::string format_number(double v) {
    if (v == 0.0) v = 0.0;  // fold -0
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

void print_type_suffix(std::ostream& os, const ValueType& t) { os << ':' << to_string(t); }

int precedence_of(const Expr& e, const OpRegistry& ops) {
    if (e.kind() != ExprKind::Binary) return 100;
    const OpSignature* op = ops.find(e.name());
    if (!op || op->notation != Notation::Infix) return 100;
    return op->precedence;
}

void print_expr_to(std::ostream& os, const Expr& e, const OpRegistry& ops) {
    switch (e.kind()) {
    case ExprKind::Var:
        os << e.name();
        return;
    case ExprKind::Const: {
        const Value& v = e.value();
        if (v.is_vector)
            os << '<' << format_number(v.x) << ", " << format_number(v.y) << '>';
        else
            os << format_number(v.x);
        const ValueType& t = *e.declared_type();
        if (!t.dim.dimensionless()) os << ':' << to_string(t.dim);
        return;
    }
    case ExprKind::Hole:
        os << '?' << e.name();
        if (e.declared_type()) print_type_suffix(os, *e.declared_type());
        return;
    case ExprKind::Unary:
        os << e.name() << '(';
        print_expr_to(os, e.args()[0], ops);
        os << ')';
        return;
    case ExprKind::Binary: {
        const OpSignature* op = ops.find(e.name());
        if (op && op->notation == Notation::Infix) {
            const int prec = op->precedence;
            const bool lparen = precedence_of(e.args()[0], ops) < prec;
            const bool rparen = precedence_of(e.args()[1], ops) <= prec;
            if (lparen) os << '(';
            print_expr_to(os, e.args()[0], ops);
            if (lparen) os << ')';
            os << ' ' << e.name() << ' ';
            if (rparen) os << '(';
            print_expr_to(os, e.args()[1], ops);
            if (rparen) os << ')';
        } else {
            os << e.name() << '(';
            print_expr_to(os, e.args()[0], ops);
            os << ", ";
            print_expr_to(os, e.args()[1], ops);
            os << ')';
        }
        return;
    }
    }
}

void print_action(std::ostream& os, const ActionRef& a) { os << (a.current ? "a_s" : a.name); }

// || binds loosest, then &&, then atoms.
int pred_level(const Pred& p) {
    switch (p.kind()) {
    case PredKind::Or:
        return 1;
    case PredKind::And:
        return 2;
    default:
        return 3;
    }
}

void print_pred_to(std::ostream& os, const Pred& p, const OpRegistry& ops) {
    switch (p.kind()) {
    case PredKind::True:
        os << "true";
        return;
    case PredKind::False:
        os << "false";
        return;
    case PredKind::ActionEq:
        print_action(os, p.action_lhs());
        os << "==";
        print_action(os, p.action_rhs());
        return;
    case PredKind::Lt:
    case PredKind::Gt: {
        print_expr_to(os, p.expr(), ops);
        os << (p.kind() == PredKind::Lt ? " < " : " > ");
        const Threshold& t = p.threshold();
        if (t.is_hole) {
            os << '?' << t.name;
            if (t.dim) os << ':' << to_string(*t.dim);
        } else {
            os << format_number(t.value);
        }
        return;
    }
    case PredKind::And:
    case PredKind::Or: {
        const int level = pred_level(p);
        const bool lparen = pred_level(p.lhs()) < level;
        const bool rparen = pred_level(p.rhs()) <= level;
        if (lparen) os << '(';
        print_pred_to(os, p.lhs(), ops);
        if (lparen) os << ')';
        os << (p.kind() == PredKind::And ? " && " : " || ");
        if (rparen) os << '(';
        print_pred_to(os, p.rhs(), ops);
        if (rparen) os << ')';
        return;
    }
    case PredKind::Hole:
        os << '?' << p.hole_id();
        return;
    }
}

}  // namespace

std::string print_expr(const Expr& e, const OpRegistry& ops) {
    std::ostringstream os;
    print_expr_to(os, e, ops);
    return os.str();
}

std::string print_pred(const Pred& p, const OpRegistry& ops) {
    std::ostringstream os;
    print_pred_to(os, p, ops);
    return os.str();
}

std::string print_policy(const Policy& p, const OpRegistry& ops) {
    std::ostringstream os;
    if (p.branches.empty()) {
        os << "return " << p.fallback << '\n';
        return os.str();
    }
    for (std::size_t i = 0; i < p.branches.size(); ++i) {
        os << (i == 0 ? "if (" : "elif (");
        print_pred_to(os, p.branches[i].guard, ops);
        os << "): " << p.branches[i].action << '\n';
    }
    os << "else: " << p.fallback << '\n';
    return os.str();
}

}  // namespace ldips
