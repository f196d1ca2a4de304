#pragma once

#include <map>
#include <string>
#include <vector>

#include "ldips/ast.hpp"
#include "ldips/operators.hpp"

namespace ldips {

inline constexpr const char* kStartActionName = "a_s";

struct InputDecl {
    std::string name;
    ValueType type;
};

struct ConstantDecl {
    double value = 0.0;
    Dimension dim;
};

struct DomainDef {
    std::string name;
    std::vector<std::string> actions;
    std::string default_action;
    std::vector<InputDecl> inputs;
    std::vector<std::string> operators;
    std::vector<ConstantDecl> constants;

    bool has_action(const std::string& a) const;
    const InputDecl* find_input(const std::string& n) const;
};

// Typing context for checking and enumeration: input types, enabled
// operators (in enumeration order) and the closed action set.
struct TypeEnv {
    std::vector<InputDecl> inputs;
    OpRegistry ops;
    std::vector<std::string> actions;
    std::vector<ConstantDecl> constants;

    const InputDecl* find_input(const std::string& n) const;
    bool has_action(const std::string& a) const;
};

// Throws SchemaError(UnknownOperator) when the domain enables an operator
// `registry` does not define.
TypeEnv make_env(const DomainDef& domain, const OpRegistry& registry = builtin_signatures());

}  // namespace ldips
