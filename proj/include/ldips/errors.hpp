#pragma once

#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ldips {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    enum class Kind { Syntax, UnknownAction, UnknownInput, UnknownOperator, DuplicateHole };

    ParseError(Kind kind, int line, int column, std::string message,
               std::set<std::string> expected = {});

    Kind kind() const { return kind_; }
    int line() const { return line_; }
    int column() const { return column_; }
    const std::set<std::string>& expected() const { return expected_; }

private:
    Kind kind_;
    int line_;
    int column_;
    std::set<std::string> expected_;
};

class TypeError : public Error {
public:
    enum class Kind {
        IncommensurableOperands,
        OperatorDomain,
        UnknownVariable,
        UnknownOperator,
        ComparisonDimensionMismatch,
        UnknownAction,
        UntypedHole,
    };

    // `path` lists child indices from the checked root down to the offending subterm.
    TypeError(Kind kind, std::vector<std::size_t> path, std::string message);

    Kind kind() const { return kind_; }
    const std::vector<std::size_t>& path() const { return path_; }

private:
    Kind kind_;
    std::vector<std::size_t> path_;
};

class EvalError : public Error {
public:
    enum class Kind { DivisionByZero, NonFinite, UnfilledHole, Arity, UnboundInput };

    EvalError(Kind kind, std::string message);
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

class SchemaError : public Error {
public:
    enum class Kind { Schema, UnknownOperator, DimensionMismatch };

    SchemaError(Kind kind, std::string where, std::string message);
    Kind kind() const { return kind_; }
    const std::string& where() const { return where_; }

private:
    Kind kind_;
    std::string where_;
};

class CapacityExceeded : public Error {
public:
    CapacityExceeded(double product, double bound);
    double product() const { return product_; }
    double bound() const { return bound_; }

private:
    double product_;
    double bound_;
};

// A blank expression has no candidate of its type.
class EmptyCandidates : public Error {
public:
    EmptyCandidates(std::string hole, std::string message) : Error(std::move(message)), hole_(std::move(hole)) {}
    const std::string& hole() const { return hole_; }

private:
    std::string hole_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace ldips
