#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ldips/ast.hpp"
#include "ldips/domain.hpp"
#include "ldips/interp.hpp"
#include "ldips/kernel.hpp"

namespace ldips {

// Values of one expression over the example sequence. `error[i]` marks an
// evaluation fault at example i (x/y are then 0).
struct Signature {
    bool is_vector = false;
    std::vector<double> x;
    std::vector<double> y;  // empty for scalars
    std::vector<std::uint8_t> error;
    bool any_error = false;

    std::size_t size() const { return x.size(); }
    Value at(std::size_t i) const { return is_vector ? Value::vec(x[i], y[i]) : Value::scalar(x[i]); }
};

// Componentwise |a - b| <= tol with matching shapes and error marks.
bool signature_equal(const Signature& a, const Signature& b, double tol);

enum class PruningMode { Full, DimensionOnly, SignatureOnly, None };

std::string to_string(PruningMode m);
bool uses_dimensions(PruningMode m);
bool uses_signatures(PruningMode m);

struct EnumConfig {
    int max_depth = 3;
    PruningMode mode = PruningMode::Full;
    double tolerance = 1e-9;
    Kernel kernel = Kernel::Parallel;
    int jobs = 0;  // 0: OpenMP default
};

// Either one concrete type or any scalar of any dimension.
struct TargetPattern {
    bool any_scalar = true;
    ValueType type{};

    static TargetPattern scalar_any() { return {true, {}}; }
    static TargetPattern exactly(ValueType t) { return {false, t}; }
    // In shape-only modes dimensions are not tracked, so only the kind is compared.
    bool matches(const ValueType& t, bool compare_dims) const;
};

struct Candidate {
    Expr expr;
    ValueType type;  // dimensions are meaningful only in dimension-pruning modes
    int depth = 1;
    Signature sig;
};

// Bottom-up enumeration. Output is ordered by depth, then operator
// registration order, then operand order; only candidates matching `target`
// are returned.
std::vector<Candidate> enum_features(const EnumConfig& cfg, const TypeEnv& env, const TargetPattern& target,
                                     const std::vector<WorldState>& examples);

struct CountRow {
    PruningMode mode;
    int depth;
    std::size_t count;
};

// Scalar feature counts for every mode and every depth 1..max_depth.
std::vector<CountRow> enum_count_report(const std::vector<EnumConfig>& cfgs, const TypeEnv& env,
                                        const std::vector<WorldState>& examples);

}  // namespace ldips
