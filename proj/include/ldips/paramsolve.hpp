#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ldips/ast.hpp"
#include "ldips/interp.hpp"
#include "ldips/kernel.hpp"

namespace ldips {

struct ParamConstraintSystem {
    std::vector<ResidualPred> must_hold;  // one per positive example
    std::vector<ResidualPred> must_fail;  // one per negative example
    std::vector<std::string> holes;
    // Examples that already decide the outcome (a positive folding to false,
    // a negative folding to true, or an evaluation fault). Nonempty means UNSAT.
    std::vector<std::string> contradictions;
};

struct BuildOptions {
    // Per-example expression hole values: (positive?, index) -> values.
    std::function<const std::vector<std::pair<std::string, Value>>*(bool, std::size_t)> expr_values;
    const OpRegistry* ops = nullptr;
    // Stop at the first contradiction instead of recording all of them.
    bool stop_at_contradiction = false;
};

ParamConstraintSystem build_system(const Pred& b, const std::vector<WorldState>& pos,
                                   const std::vector<WorldState>& neg, const BuildOptions& opts = {});

// Sorted by hole name.
using ParamAssignment = std::vector<std::pair<std::string, double>>;

enum class Objective {
    MaxMinMargin,  // maximize the smallest |constant - value| over all atoms
    MinAbsSum,     // minimize the sum of |value| (repair adjustments)
};

struct SolveOptions {
    double capacity = 1e7;
    Objective objective = Objective::MaxMinMargin;
    bool include_zero = false;  // add 0 to every hole's candidate grid
    Kernel kernel = Kernel::Parallel;
    int jobs = 0;
    // Per-hole replacement for the 1 in the open-ray offset max(1, range) / 2.
    std::map<std::string, double> ray_unit;
};

struct SolveResult {
    bool sat = false;
    ParamAssignment assignment;
    double objective = 0.0;
    std::size_t nodes = 0;  // search nodes visited
    std::string reason;     // on UNSAT
};

// Per-hole candidate grid: midpoints of consecutive distinct constants plus
// one point below and above (offset max(1, range) / 2); {0} with no constants.
std::vector<double> candidate_grid(std::vector<double> constants, bool include_zero, double unit = 1.0);

// Complete over the candidate grids. Throws CapacityExceeded when the
// product of the propagated domains exceeds opts.capacity.
SolveResult solve(const ParamConstraintSystem& sys, const SolveOptions& opts = {});

// Exhaustive product search without propagation; the reference for solve.
SolveResult solve_reference(const ParamConstraintSystem& sys, const SolveOptions& opts = {});

// Best candidate by minimum margin; ties go to the lexicographically smaller
// assignment (holes by name, smaller value first).
ParamAssignment rank_assignment(const ParamConstraintSystem& sys, const std::vector<ParamAssignment>& candidates);

double min_margin(const ParamConstraintSystem& sys, const ParamAssignment& a);

bool satisfies(const ParamConstraintSystem& sys, const ParamAssignment& a);

struct Adjustment {
    std::string name;
    double old_value = 0.0;
    double delta = 0.0;
    double new_value = 0.0;
};

struct RepairResult {
    bool sat = false;
    Policy policy;  // repaired; parameters renumbered t1, t2, ...
    std::vector<Adjustment> adjustments;
    std::string reason;
};

// Adds a blank adjustment to every concrete threshold and finds the
// adjustment vector with the least total |delta| under which every
// correction's next action is produced.
RepairResult repair(const Policy& p, const std::vector<Demonstration>& corrections, const SolveOptions& opts = {});

Policy apply_adjustments(const Policy& p, const std::vector<Adjustment>& adjustments);

}  // namespace ldips
