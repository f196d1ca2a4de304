#include "ldips/operators.hpp"

#include <cmath>

#include "ldips/errors.hpp"

namespace ldips {

void OpRegistry::add(OpSignature op) {
    for (OpSignature& existing : ops_) {
        if (existing.name == op.name) {
            existing = std::move(op);
            return;
        }
    }
    ops_.push_back(std::move(op));
}

const OpSignature* OpRegistry::find(const std::string& name) const {
    for (const OpSignature& op : ops_)
        if (op.name == name) return &op;
    return nullptr;
}

OpRegistry OpRegistry::subset(const std::vector<std::string>& names) const {
    OpRegistry out;
    for (const std::string& n : names) {
        const OpSignature* op = find(n);
        if (!op) throw SchemaError(SchemaError::Kind::UnknownOperator, "operators", "unknown operator '" + n + "'");
        out.add(*op);
    }
    return out;
}

namespace {

using Types = std::span<const ValueType>;
using Values = std::span<const Value>;
using Rule = std::optional<ValueType>;

std::optional<Value> finite(Value v) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) return std::nullopt;
    return v;
}

OpSignature scalar_unary(std::string name, bool dimensionless_only, double (*fn)(double)) {
    OpSignature op;
    op.name = std::move(name);
    op.arity = 1;
    op.type_rule = [dimensionless_only](Types t) -> Rule {
        if (!t[0].is_scalar()) return std::nullopt;
        if (dimensionless_only && !t[0].dim.dimensionless()) return std::nullopt;
        return t[0];
    };
    op.shape_rule = [dimensionless_only](Types t) -> Rule {
        if (!t[0].is_scalar()) return std::nullopt;
        return dimensionless_only ? ValueType::scalar() : t[0];
    };
    op.eval = [fn](Values v) { return finite(Value::scalar(fn(v[0].x))); };
    return op;
}

// + and -: d x d -> d, V(d) x V(d) -> V(d)
OpSignature additive(std::string name, double sign) {
    OpSignature op;
    op.name = std::move(name);
    op.arity = 2;
    op.notation = Notation::Infix;
    op.precedence = 1;
    op.type_rule = [](Types t) -> Rule {
        if (t[0].kind != t[1].kind || t[0].kind == TypeKind::Bool) return std::nullopt;
        if (t[0].dim != t[1].dim) return std::nullopt;
        return t[0];
    };
    op.shape_rule = [](Types t) -> Rule {
        if (t[0].kind != t[1].kind || t[0].kind == TypeKind::Bool) return std::nullopt;
        return t[0];
    };
    op.eval = [sign](Values v) {
        Value r = v[0];
        r.x += sign * v[1].x;
        r.y += sign * v[1].y;
        return finite(r);
    };
    return op;
}

}  // namespace

OpRegistry builtin_signatures() {
    OpRegistry reg;
    reg.add(scalar_unary("abs", false, [](double x) { return std::fabs(x); }));
    reg.add(scalar_unary("sin", true, [](double x) { return std::sin(x); }));
    reg.add(scalar_unary("cos", true, [](double x) { return std::cos(x); }));

    OpSignature norm;
    norm.name = "norm";
    norm.arity = 1;
    norm.type_rule = [](Types t) -> Rule {
        if (!t[0].is_vector()) return std::nullopt;
        return ValueType::scalar(t[0].dim);
    };
    norm.shape_rule = norm.type_rule;
    norm.eval = [](Values v) { return finite(Value::scalar(std::hypot(v[0].x, v[0].y))); };
    reg.add(std::move(norm));

    reg.add(additive("+", 1.0));
    reg.add(additive("-", -1.0));

    // d1 x d2 -> d1 + d2, d1 x V(d2) -> V(d1 + d2)
    OpSignature mul;
    mul.name = "*";
    mul.arity = 2;
    mul.notation = Notation::Infix;
    mul.precedence = 2;
    mul.type_rule = [](Types t) -> Rule {
        if (!t[0].is_scalar() || t[1].kind == TypeKind::Bool) return std::nullopt;
        return ValueType{t[1].kind, dim_add(t[0].dim, t[1].dim)};
    };
    mul.shape_rule = mul.type_rule;
    mul.eval = [](Values v) {
        if (v[1].is_vector) return finite(Value::vec(v[0].x * v[1].x, v[0].x * v[1].y));
        return finite(Value::scalar(v[0].x * v[1].x));
    };
    reg.add(std::move(mul));

    // d1 x d2 -> d1 - d2, V(d1) x d2 -> V(d1 - d2)
    OpSignature div;
    div.name = "/";
    div.arity = 2;
    div.notation = Notation::Infix;
    div.precedence = 2;
    div.type_rule = [](Types t) -> Rule {
        if (!t[1].is_scalar() || t[0].kind == TypeKind::Bool) return std::nullopt;
        return ValueType{t[0].kind, dim_sub(t[0].dim, t[1].dim)};
    };
    div.shape_rule = div.type_rule;
    div.eval = [](Values v) -> std::optional<Value> {
        if (v[1].x == 0.0) return std::nullopt;
        if (v[0].is_vector) return finite(Value::vec(v[0].x / v[1].x, v[0].y / v[1].x));
        return finite(Value::scalar(v[0].x / v[1].x));
    };
    reg.add(std::move(div));

    // V(d) x V(d) -> d
    OpSignature dist;
    dist.name = "dist";
    dist.arity = 2;
    dist.type_rule = [](Types t) -> Rule {
        if (!t[0].is_vector() || !t[1].is_vector() || t[0].dim != t[1].dim) return std::nullopt;
        return ValueType::scalar(t[0].dim);
    };
    dist.shape_rule = [](Types t) -> Rule {
        if (!t[0].is_vector() || !t[1].is_vector()) return std::nullopt;
        return ValueType::scalar(t[0].dim);
    };
    dist.eval = [](Values v) {
        return finite(Value::scalar(std::hypot(v[0].x - v[1].x, v[0].y - v[1].y)));
    };
    reg.add(std::move(dist));
    return reg;
}

const OpRegistry& builtin_registry() {
    static const OpRegistry ops = builtin_signatures();
    return ops;
}

}  // namespace ldips
