#include "ldips/errors.hpp"

#include "ldips/dimension.hpp"

namespace ldips {

namespace {

std::string located(int line, int column, const std::string& message) {
    return std::to_string(line) + ":" + std::to_string(column) + ": " + message;
}

}  // namespace

ParseError::ParseError(Kind kind, int line, int column, std::string message,
                       std::set<std::string> expected)
    : Error(located(line, column, message)),
      kind_(kind),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

TypeError::TypeError(Kind kind, std::vector<std::size_t> path, std::string message)
    : Error(std::move(message)), kind_(kind), path_(std::move(path)) {}

EvalError::EvalError(Kind kind, std::string message) : Error(std::move(message)), kind_(kind) {}

SchemaError::SchemaError(Kind kind, std::string where, std::string message)
    : Error(where.empty() ? message : where + ": " + message), kind_(kind), where_(std::move(where)) {}

CapacityExceeded::CapacityExceeded(double product, double bound)
    : Error("candidate product " + std::to_string(product) + " exceeds bound " +
            std::to_string(bound)),
      product_(product),
      bound_(bound) {}

std::string to_string(Dimension d) {
    return "[" + std::to_string(d.length()) + "," + std::to_string(d.time()) + "," +
           std::to_string(d.mass()) + "]";
}

std::string to_string(const ValueType& t) {
    switch (t.kind) {
    case TypeKind::Bool:
        return "bool";
    case TypeKind::Scalar:
        return to_string(t.dim);
    case TypeKind::Vector:
        return "V" + to_string(t.dim);
    }
    return "?";
}

}  // namespace ldips
