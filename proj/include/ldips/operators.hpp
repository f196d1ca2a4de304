#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ldips/ast.hpp"
#include "ldips/dimension.hpp"

namespace ldips {

enum class Notation { Prefix, Infix };

// Typing and evaluation rules for one operator. `type_rule` enforces
// dimensions; `shape_rule` only checks scalar/vector shapes and is what the
// non-dimension enumeration modes use. Both return nullopt to reject.
struct OpSignature {
    std::string name;
    int arity = 1;
    Notation notation = Notation::Prefix;
    int precedence = 0;  // infix only: higher binds tighter
    std::function<std::optional<ValueType>(std::span<const ValueType>)> type_rule;
    std::function<std::optional<ValueType>(std::span<const ValueType>)> shape_rule;
    // nullopt signals an evaluation fault (division by zero).
    std::function<std::optional<Value>(std::span<const Value>)> eval;
};

class OpRegistry {
public:
    OpRegistry() = default;

    // Re-registering a name replaces the earlier entry in place.
    void add(OpSignature op);
    const OpSignature* find(const std::string& name) const;
    const std::vector<OpSignature>& ops() const { return ops_; }

    // Keeps only the named operators, in the order given. Throws SchemaError
    // (UnknownOperator) for names that are not registered.
    OpRegistry subset(const std::vector<std::string>& names) const;

private:
    std::vector<OpSignature> ops_;
};

// abs, sin, cos, norm, +, -, *, /, dist
OpRegistry builtin_signatures();

// Shared immutable instance of builtin_signatures().
const OpRegistry& builtin_registry();

}  // namespace ldips
