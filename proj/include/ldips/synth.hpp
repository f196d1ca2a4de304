#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ldips/ast.hpp"
#include "ldips/domain.hpp"
#include "ldips/enumerate.hpp"
#include "ldips/interp.hpp"
#include "ldips/paramsolve.hpp"

namespace ldips {

struct SubProblem {
    std::string start;
    std::string target;
    std::vector<WorldState> positives;
    std::vector<WorldState> negatives;
};

struct SynthConfig {
    int max_depth = 3;  // feature (expression) depth
    int max_atoms = 3;  // comparisons per synthesized predicate
    PruningMode mode = PruningMode::Full;
    double tolerance = 1e-9;
    double capacity = 1e7;
    Kernel kernel = Kernel::Parallel;
    int jobs = 0;

    EnumConfig enum_config() const;
    SolveOptions solve_options() const;
};

struct SynthStats {
    double enumeration_seconds = 0.0;
    double solving_seconds = 0.0;
    double assembly_seconds = 0.0;
    std::size_t features = 0;
    std::size_t skeletons = 0;
    std::size_t fills = 0;
    std::size_t solver_calls = 0;
};

// Odometer over the cartesian product of per-hole candidates (last hole
// fastest). Throws EmptyCandidates if some hole has no candidate of its type.
class FillStream {
public:
    // With `skip_errors`, candidates that fault on some example are not offered.
    FillStream(const Pred& b, const std::vector<Candidate>& candidates, bool skip_errors = false);

    // Next filled predicate; parameters stay blank.
    std::optional<Pred> next();
    // Candidate indices (into the constructor's list) of the last fill, one per hole.
    const std::vector<std::size_t>& choice() const { return chosen_; }
    const std::vector<ExprHoleInfo>& holes() const { return holes_; }
    // Candidate indices offered for each hole, in stream order.
    const std::vector<std::vector<std::size_t>>& options() const { return options_; }
    double size() const;

private:
    Pred b_;
    const std::vector<Candidate>* candidates_;
    std::vector<ExprHoleInfo> holes_;
    std::vector<std::vector<std::size_t>> options_;
    std::vector<std::size_t> pos_;
    std::vector<std::size_t> chosen_;
    bool started_ = false;
    bool done_ = false;
};

FillStream fill_expressions(const Pred& b, const std::vector<Candidate>& candidates);

// Fills the expression holes and then the parameters of `b` so it is true on
// every positive and false on every negative. nullopt means UNSAT.
std::optional<Pred> l2(const SynthConfig& cfg, const TypeEnv& env, const std::vector<WorldState>& pos,
                       const std::vector<WorldState>& neg, const Pred& b, SynthStats* stats = nullptr);

// Same, with features already enumerated over pos followed by neg.
std::optional<Pred> l2_with(const SynthConfig& cfg, const std::vector<Candidate>& features,
                            const std::vector<WorldState>& pos, const std::vector<WorldState>& neg, const Pred& b,
                            SynthStats* stats = nullptr);

std::vector<SubProblem> divide_problem(const std::vector<Demonstration>& demos, const DomainDef& domain);

// Skeletons of And/Or over (?e > ?p) / (?e < ?p) atoms by increasing size.
class PredicateStream {
public:
    explicit PredicateStream(int max_atoms, std::string prefix = "");
    std::optional<Pred> next();

private:
    struct Shape {
        int kind;  // 0: >, 1: <, 2: And, 3: Or
        int left = -1;
        int right = -1;
        int atoms = 1;
    };
    Pred instantiate(int shape, int& counter) const;

    std::vector<Shape> shapes_;
    std::size_t next_ = 0;
    std::string prefix_;
};

PredicateStream enum_predicates(int max_atoms, std::string prefix = "");

struct SynthResult {
    bool sat = false;
    Policy policy;
    std::string reason;  // the failing sub-problem or branch on UNSAT
    SynthStats stats;
};

SynthResult l3(const SynthConfig& cfg, const std::vector<Demonstration>& demos, const DomainDef& domain,
               const std::optional<Policy>& sketch = std::nullopt);

Policy make_policy(const std::vector<SubProblem>& subproblems, const std::vector<Pred>& guards,
                   const DomainDef& domain);

}  // namespace ldips
