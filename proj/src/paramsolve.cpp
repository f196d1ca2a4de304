#include "ldips/paramsolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <omp.h>

#include "ldips/errors.hpp"

namespace ldips {

ParamConstraintSystem build_system(const Pred& b, const std::vector<WorldState>& pos,
                                   const std::vector<WorldState>& neg, const BuildOptions& opts) {
    ParamConstraintSystem sys;
    for (const ParamHoleInfo& h : collect_holes(b).params) sys.holes.push_back(h.name);

    auto add = [&](bool positive, std::size_t i, const WorldState& w) {
        PartialEvalOptions po;
        po.ops = opts.ops;
        if (opts.expr_values) po.expr_values = opts.expr_values(positive, i);
        const std::string label = (positive ? "positive " : "negative ") + std::to_string(i);
        try {
            ResidualPred r = partial_eval(b, w, po);
            if (positive) {
                if (r.is_false())
                    sys.contradictions.push_back(label + " is false for every parameter value");
                else if (!r.is_true())
                    sys.must_hold.push_back(std::move(r));
            } else {
                if (r.is_true())
                    sys.contradictions.push_back(label + " is true for every parameter value");
                else if (!r.is_false())
                    sys.must_fail.push_back(std::move(r));
            }
        } catch (const EvalError& e) {
            sys.contradictions.push_back(label + " fails to evaluate: " + e.what());
        }
    };
    for (std::size_t i = 0; i < pos.size(); ++i) {
        add(true, i, pos[i]);
        if (opts.stop_at_contradiction && !sys.contradictions.empty()) return sys;
    }
    for (std::size_t i = 0; i < neg.size(); ++i) {
        add(false, i, neg[i]);
        if (opts.stop_at_contradiction && !sys.contradictions.empty()) return sys;
    }
    return sys;
}

std::vector<double> candidate_grid(std::vector<double> constants, bool include_zero, double unit) {
    std::sort(constants.begin(), constants.end());
    constants.erase(std::unique(constants.begin(), constants.end()), constants.end());
    std::vector<double> grid;
    if (constants.empty()) {
        grid.push_back(0.0);
        return grid;
    }
    const double off = std::max(unit, constants.back() - constants.front()) * 0.5;
    grid.push_back(constants.front() - off);
    for (std::size_t i = 0; i + 1 < constants.size(); ++i) {
        const double mid = constants[i] + (constants[i + 1] - constants[i]) * 0.5;
        // Adjacent doubles leave no room between them.
        if (mid > constants[i] && mid < constants[i + 1]) grid.push_back(mid);
    }
    grid.push_back(constants.back() + off);
    if (include_zero && !std::binary_search(grid.begin(), grid.end(), 0.0)) {
        grid.insert(std::lower_bound(grid.begin(), grid.end(), 0.0), 0.0);
    }
    return grid;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void collect_atoms(const ResidualPred& r, std::vector<const ResidualPred*>& out) {
    if (r.kind == ResidualPred::Kind::Atom) {
        out.push_back(&r);
        return;
    }
    for (const ResidualPred& c : r.children) collect_atoms(c, out);
}

// Literal over a hole's candidate index k: k >= bound or k <= bound.
struct Lit {
    int hole;
    bool ge;
    int bound;
};

enum class NT : std::uint8_t { Lit, And, Or, True, False };

struct Node {
    NT t;
    Lit lit{};
    std::vector<int> kids;
};

struct Constraint {
    std::vector<Node> nodes;
    int root = 0;
    std::vector<int> holes;
};

struct Compiled {
    std::vector<std::string> names;
    std::vector<std::vector<double>> grid;
    std::vector<std::vector<double>> contrib;  // per index, larger is better
    std::vector<Constraint> cons;
};

int hole_index(const Compiled& c, const std::string& name) {
    auto it = std::lower_bound(c.names.begin(), c.names.end(), name);
    return static_cast<int>(it - c.names.begin());
}

int compile_node(const ResidualPred& r, bool negated, const Compiled& comp, Constraint& out) {
    using K = ResidualPred::Kind;
    Node n;
    switch (r.kind) {
    case K::True:
        n.t = negated ? NT::False : NT::True;
        break;
    case K::False:
        n.t = negated ? NT::True : NT::False;
        break;
    case K::Not:
        return compile_node(r.children[0], !negated, comp, out);
    case K::Atom: {
        const int h = hole_index(comp, r.param);
        const std::vector<double>& v = comp.grid[h];
        n.t = NT::Lit;
        if (r.rel == ResidualPred::Rel::Lt) {
            // c < x  <=>  k >= first index with grid > c
            const int ub = static_cast<int>(std::upper_bound(v.begin(), v.end(), r.constant) - v.begin());
            n.lit = negated ? Lit{h, false, ub - 1} : Lit{h, true, ub};
        } else {
            // c > x  <=>  k < first index with grid >= c
            const int lb = static_cast<int>(std::lower_bound(v.begin(), v.end(), r.constant) - v.begin());
            n.lit = negated ? Lit{h, true, lb} : Lit{h, false, lb - 1};
        }
        if (std::find(out.holes.begin(), out.holes.end(), h) == out.holes.end()) out.holes.push_back(h);
        break;
    }
    case K::And:
    case K::Or: {
        const bool conj = (r.kind == K::And) != negated;
        n.t = conj ? NT::And : NT::Or;
        for (const ResidualPred& c : r.children) n.kids.push_back(compile_node(c, negated, comp, out));
        break;
    }
    }
    out.nodes.push_back(std::move(n));
    return static_cast<int>(out.nodes.size()) - 1;
}

Compiled compile(const ParamConstraintSystem& sys, const SolveOptions& opts) {
    Compiled comp;
    std::vector<const ResidualPred*> atoms;
    for (const ResidualPred& r : sys.must_hold) collect_atoms(r, atoms);
    for (const ResidualPred& r : sys.must_fail) collect_atoms(r, atoms);

    comp.names = sys.holes;
    for (const ResidualPred* a : atoms) comp.names.push_back(a->param);
    std::sort(comp.names.begin(), comp.names.end());
    comp.names.erase(std::unique(comp.names.begin(), comp.names.end()), comp.names.end());

    std::vector<std::vector<double>> constants(comp.names.size());
    for (const ResidualPred* a : atoms) constants[hole_index(comp, a->param)].push_back(a->constant);
    for (std::size_t h = 0; h < comp.names.size(); ++h) {
        std::vector<double> cs = constants[h];
        const auto unit = opts.ray_unit.find(comp.names[h]);
        comp.grid.push_back(candidate_grid(cs, opts.include_zero, unit == opts.ray_unit.end() ? 1.0 : unit->second));
        std::sort(cs.begin(), cs.end());
        std::vector<double> contrib;
        for (double v : comp.grid.back()) {
            if (opts.objective == Objective::MinAbsSum) {
                contrib.push_back(-std::fabs(v));
                continue;
            }
            double m = kInf;
            auto it = std::lower_bound(cs.begin(), cs.end(), v);
            if (it != cs.end()) m = std::min(m, std::fabs(*it - v));
            if (it != cs.begin()) m = std::min(m, std::fabs(*(it - 1) - v));
            contrib.push_back(m);
        }
        comp.contrib.push_back(std::move(contrib));
    }

    for (const ResidualPred& r : sys.must_hold) {
        Constraint c;
        c.root = compile_node(r, false, comp, c);
        comp.cons.push_back(std::move(c));
    }
    for (const ResidualPred& r : sys.must_fail) {
        Constraint c;
        c.root = compile_node(r, true, comp, c);
        comp.cons.push_back(std::move(c));
    }
    return comp;
}

struct State {
    std::vector<int> lo;
    std::vector<int> hi;
    std::vector<char> active;
    int n_active = 0;
};

enum Tri : std::uint8_t { F = 0, T = 1, U = 2 };

Tri eval3(const Constraint& c, int n, const State& s) {
    const Node& node = c.nodes[n];
    switch (node.t) {
    case NT::True:
        return T;
    case NT::False:
        return F;
    case NT::Lit: {
        const Lit& l = node.lit;
        if (l.ge) return s.lo[l.hole] >= l.bound ? T : (s.hi[l.hole] < l.bound ? F : U);
        return s.hi[l.hole] <= l.bound ? T : (s.lo[l.hole] > l.bound ? F : U);
    }
    case NT::And: {
        Tri r = T;
        for (int k : node.kids) {
            Tri v = eval3(c, k, s);
            if (v == F) return F;
            if (v == U) r = U;
        }
        return r;
    }
    case NT::Or: {
        Tri r = F;
        for (int k : node.kids) {
            Tri v = eval3(c, k, s);
            if (v == T) return T;
            if (v == U) r = U;
        }
        return r;
    }
    }
    return U;
}

// Tightens domains with every literal the node forces. False on conflict.
bool force(const Constraint& c, int n, State& s, bool& changed) {
    const Node& node = c.nodes[n];
    switch (node.t) {
    case NT::True:
        return true;
    case NT::False:
        return false;
    case NT::Lit: {
        const Lit& l = node.lit;
        if (l.ge) {
            if (s.lo[l.hole] < l.bound) {
                s.lo[l.hole] = l.bound;
                changed = true;
            }
        } else if (s.hi[l.hole] > l.bound) {
            s.hi[l.hole] = l.bound;
            changed = true;
        }
        return s.lo[l.hole] <= s.hi[l.hole];
    }
    case NT::And:
        for (int k : node.kids)
            if (!force(c, k, s, changed)) return false;
        return true;
    case NT::Or: {
        int open = -1;
        int n_open = 0;
        for (int k : node.kids) {
            Tri v = eval3(c, k, s);
            if (v == T) return true;
            if (v == U) {
                open = k;
                ++n_open;
            }
        }
        if (n_open == 0) return false;
        if (n_open == 1) return force(c, open, s, changed);
        return true;
    }
    }
    return true;
}

bool propagate(const Compiled& comp, State& s) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < comp.cons.size(); ++i) {
            if (!s.active[i]) continue;
            const Constraint& c = comp.cons[i];
            Tri v = eval3(c, c.root, s);
            if (v == F) return false;
            if (v == T) {
                s.active[i] = 0;
                --s.n_active;
                continue;
            }
            if (!force(c, c.root, s, changed)) return false;
        }
    }
    return true;
}

void mark_directions(const Constraint& c, int n, const State& s, std::vector<std::uint8_t>& dir) {
    const Node& node = c.nodes[n];
    if (node.t == NT::Lit) {
        if (eval3(c, n, s) == U) dir[node.lit.hole] |= node.lit.ge ? 1 : 2;
        return;
    }
    for (int k : node.kids) mark_directions(c, k, s, dir);
}

enum class Feasible { No, Yes, Unknown };

// A hole whose open literals all point one way can be pinned to that end of
// its domain without losing any solution. Exact, and usually decisive.
Feasible decide_monotone(const Compiled& comp, State s) {
    const std::size_t H = comp.names.size();
    while (true) {
        if (!propagate(comp, s)) return Feasible::No;
        if (s.n_active == 0) return Feasible::Yes;
        std::vector<std::uint8_t> dir(H, 0);
        for (std::size_t i = 0; i < comp.cons.size(); ++i)
            if (s.active[i]) mark_directions(comp.cons[i], comp.cons[i].root, s, dir);
        bool pinned = false;
        for (std::size_t h = 0; h < H; ++h) {
            if (s.lo[h] == s.hi[h]) continue;
            if (dir[h] == 1) {
                s.lo[h] = s.hi[h];
                pinned = true;
            } else if (dir[h] == 2) {
                s.hi[h] = s.lo[h];
                pinned = true;
            }
        }
        if (!pinned) return Feasible::Unknown;
    }
}

double combine(Objective o, double a, double b) { return o == Objective::MinAbsSum ? a + b : std::min(a, b); }
double identity(Objective o) { return o == Objective::MinAbsSum ? 0.0 : kInf; }

struct Best {
    bool found = false;
    double score = 0.0;
    std::vector<int> ks;
};

bool better(double score, const std::vector<int>& ks, const Best& b) {
    if (!b.found) return true;
    if (score != b.score) return score > b.score;
    return ks < b.ks;
}

class Searcher {
public:
    Searcher(const Compiled& comp, Objective obj) : comp_(comp), obj_(obj), H_(comp.names.size()), ks_(H_, 0) {}

    void run(const State& s, int i, double prefix) { dfs(s, i, prefix); }
    void set_prefix(int i, int k) { ks_[i] = k; }

    Best best;
    std::size_t nodes = 0;

private:
    double max_contrib(std::size_t h, const State& s) const {
        double m = -kInf;
        for (int k = s.lo[h]; k <= s.hi[h]; ++k) m = std::max(m, comp_.contrib[h][k]);
        return m;
    }

    bool prefix_greater(std::size_t i) const {
        for (std::size_t h = 0; h < i; ++h)
            if (ks_[h] != best.ks[h]) return ks_[h] > best.ks[h];
        return false;
    }

    void leaf(double score) {
        if (better(score, ks_, best)) {
            best.found = true;
            best.score = score;
            best.ks = ks_;
        }
    }

    // All constraints are decided, so each remaining hole is free within its domain.
    void complete_free(const State& s, std::size_t i, double prefix) {
        if (obj_ == Objective::MinAbsSum) {
            double score = prefix;
            for (std::size_t h = i; h < H_; ++h) {
                int arg = s.lo[h];
                for (int k = s.lo[h]; k <= s.hi[h]; ++k)
                    if (comp_.contrib[h][k] > comp_.contrib[h][arg]) arg = k;
                ks_[h] = arg;
                score += comp_.contrib[h][arg];
            }
            leaf(score);
            return;
        }
        double target = prefix;
        for (std::size_t h = i; h < H_; ++h) target = std::min(target, max_contrib(h, s));
        for (std::size_t h = i; h < H_; ++h) {
            int k = s.lo[h];
            while (comp_.contrib[h][k] < target) ++k;
            ks_[h] = k;
        }
        leaf(target);
    }

    void dfs(const State& s, std::size_t i, double prefix) {
        ++nodes;
        if (i == H_) {
            leaf(prefix);
            return;
        }
        if (best.found) {
            double bound = prefix;
            for (std::size_t h = i; h < H_; ++h) bound = combine(obj_, bound, max_contrib(h, s));
            if (bound < best.score || (bound == best.score && prefix_greater(i))) return;
        }
        if (s.n_active == 0) {
            complete_free(s, i, prefix);
            return;
        }
        for (int k = s.lo[i]; k <= s.hi[i]; ++k) {
            State t = s;
            t.lo[i] = t.hi[i] = k;
            if (!propagate(comp_, t)) continue;
            ks_[i] = k;
            dfs(t, i + 1, combine(obj_, prefix, comp_.contrib[i][k]));
        }
    }

    const Compiled& comp_;
    Objective obj_;
    std::size_t H_;
    std::vector<int> ks_;
};

SolveResult finish(const Compiled& comp, const Best& best, std::size_t nodes) {
    SolveResult r;
    r.nodes = nodes;
    if (!best.found) {
        r.reason = "no parameter assignment satisfies every example";
        return r;
    }
    r.sat = true;
    r.objective = best.score;
    for (std::size_t h = 0; h < comp.names.size(); ++h) r.assignment.emplace_back(comp.names[h], comp.grid[h][best.ks[h]]);
    return r;
}

}  // namespace

SolveResult solve(const ParamConstraintSystem& sys, const SolveOptions& opts) {
    if (!sys.contradictions.empty()) {
        SolveResult r;
        r.reason = sys.contradictions.front();
        return r;
    }
    const Compiled comp = compile(sys, opts);
    const std::size_t H = comp.names.size();
    State s;
    s.lo.assign(H, 0);
    s.hi.resize(H);
    for (std::size_t h = 0; h < H; ++h) s.hi[h] = static_cast<int>(comp.grid[h].size()) - 1;
    s.active.assign(comp.cons.size(), 1);
    s.n_active = static_cast<int>(comp.cons.size());

    if (!propagate(comp, s)) return finish(comp, Best{}, 1);

    double product = 1.0;
    for (std::size_t h = 0; h < H; ++h) product *= s.hi[h] - s.lo[h] + 1;
    if (product > opts.capacity) throw CapacityExceeded(product, opts.capacity);

    if (decide_monotone(comp, s) == Feasible::No) return finish(comp, Best{}, 1);
    if (H == 0) {
        Best b;
        b.found = true;
        b.score = identity(opts.objective);
        return finish(comp, b, 1);
    }

    if (opts.kernel == Kernel::Serial || s.lo[0] == s.hi[0]) {
        Searcher search(comp, opts.objective);
        search.run(s, 0, identity(opts.objective));
        return finish(comp, search.best, search.nodes);
    }

    // Split the first hole's domain across threads and reduce with the same
    // total order the serial search uses.
    const int first = s.lo[0];
    const int count = s.hi[0] - s.lo[0] + 1;
    std::vector<Best> bests(count);
    std::vector<std::size_t> nodes(count, 0);
    const int threads = opts.jobs > 0 ? opts.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (int j = 0; j < count; ++j) {
        State t = s;
        t.lo[0] = t.hi[0] = first + j;
        if (!propagate(comp, t)) continue;
        Searcher search(comp, opts.objective);
        search.set_prefix(0, first + j);
        search.run(t, 1, combine(opts.objective, identity(opts.objective), comp.contrib[0][first + j]));
        bests[j] = search.best;
        nodes[j] = search.nodes;
    }
    Best best;
    for (const Best& b : bests)
        if (b.found && better(b.score, b.ks, best)) best = b;
    return finish(comp, best, std::accumulate(nodes.begin(), nodes.end(), std::size_t{1}));
}

SolveResult solve_reference(const ParamConstraintSystem& sys, const SolveOptions& opts) {
    if (!sys.contradictions.empty()) {
        SolveResult r;
        r.reason = sys.contradictions.front();
        return r;
    }
    const Compiled comp = compile(sys, opts);
    const std::size_t H = comp.names.size();
    double product = 1.0;
    for (const auto& g : comp.grid) product *= static_cast<double>(g.size());
    if (product > opts.capacity) throw CapacityExceeded(product, opts.capacity);

    Best best;
    std::vector<int> ks(H, 0);
    std::size_t nodes = 0;
    std::map<std::string, double> values;
    while (true) {
        ++nodes;
        double score = identity(opts.objective);
        for (std::size_t h = 0; h < H; ++h) {
            values[comp.names[h]] = comp.grid[h][ks[h]];
            score = combine(opts.objective, score, comp.contrib[h][ks[h]]);
        }
        bool ok = true;
        for (const ResidualPred& r : sys.must_hold) ok = ok && r.holds(values);
        for (const ResidualPred& r : sys.must_fail) ok = ok && !r.holds(values);
        if (ok && better(score, ks, best)) {
            best.found = true;
            best.score = score;
            best.ks = ks;
        }
        bool carry = true;
        for (std::size_t h = H; h > 0 && carry;) {
            --h;
            if (++ks[h] < static_cast<int>(comp.grid[h].size()))
                carry = false;
            else
                ks[h] = 0;
        }
        if (carry) break;
    }
    return finish(comp, best, nodes);
}

double min_margin(const ParamConstraintSystem& sys, const ParamAssignment& a) {
    std::vector<const ResidualPred*> atoms;
    for (const ResidualPred& r : sys.must_hold) collect_atoms(r, atoms);
    for (const ResidualPred& r : sys.must_fail) collect_atoms(r, atoms);
    double m = kInf;
    for (const ResidualPred* atom : atoms)
        for (const auto& [name, v] : a)
            if (name == atom->param) m = std::min(m, std::fabs(atom->constant - v));
    return m;
}

bool satisfies(const ParamConstraintSystem& sys, const ParamAssignment& a) {
    if (!sys.contradictions.empty()) return false;
    std::map<std::string, double> values(a.begin(), a.end());
    for (const ResidualPred& r : sys.must_hold)
        if (!r.holds(values)) return false;
    for (const ResidualPred& r : sys.must_fail)
        if (r.holds(values)) return false;
    return true;
}

ParamAssignment rank_assignment(const ParamConstraintSystem& sys, const std::vector<ParamAssignment>& candidates) {
    const ParamAssignment* best = nullptr;
    double best_margin = -kInf;
    auto sorted = [](ParamAssignment a) {
        std::sort(a.begin(), a.end());
        return a;
    };
    for (const ParamAssignment& c : candidates) {
        const double m = min_margin(sys, c);
        if (!best || m > best_margin) {
            best = &c;
            best_margin = m;
            continue;
        }
        if (m < best_margin) continue;
        const ParamAssignment x = sorted(c);
        const ParamAssignment y = sorted(*best);
        for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
            if (x[i].second != y[i].second) {
                if (x[i].second < y[i].second) best = &c;
                break;
            }
        }
    }
    return best ? sorted(*best) : ParamAssignment{};
}

namespace {

Pred set_params(const Pred& p, const std::map<std::string, double>& values) {
    switch (p.kind()) {
    case PredKind::Lt:
    case PredKind::Gt: {
        Threshold t = p.threshold();
        if (!t.is_hole) {
            auto it = values.find(t.name);
            if (it != values.end()) t.value = it->second;
        }
        return p.kind() == PredKind::Lt ? Pred::lt(p.expr(), t) : Pred::gt(p.expr(), t);
    }
    case PredKind::And:
        return Pred::conj(set_params(p.lhs(), values), set_params(p.rhs(), values));
    case PredKind::Or:
        return Pred::disj(set_params(p.lhs(), values), set_params(p.rhs(), values));
    default:
        return p;
    }
}

void collect_params(const Pred& p, std::vector<std::pair<std::string, double>>& out) {
    switch (p.kind()) {
    case PredKind::Lt:
    case PredKind::Gt:
        if (!p.threshold().is_hole) out.emplace_back(p.threshold().name, p.threshold().value);
        return;
    case PredKind::And:
    case PredKind::Or:
        collect_params(p.lhs(), out);
        collect_params(p.rhs(), out);
        return;
    default:
        return;
    }
}

// Residual that holds iff the decision list yields `label` at `w`.
ResidualPred selects(const Policy& p, const WorldState& w, const std::string& label) {
    PartialEvalOptions po;
    po.adjust_params = true;
    std::vector<ResidualPred> alternatives;
    std::vector<ResidualPred> earlier_fail;
    for (const Branch& b : p.branches) {
        ResidualPred g = partial_eval(b.guard, w, po);
        if (b.action == label) {
            std::vector<ResidualPred> parts = earlier_fail;
            parts.push_back(g);
            alternatives.push_back(ResidualPred::all(std::move(parts)));
        }
        earlier_fail.push_back(ResidualPred::negate(std::move(g)));
        if (earlier_fail.back().is_false()) break;
    }
    if (p.fallback == label) alternatives.push_back(ResidualPred::all(earlier_fail));
    return ResidualPred::any(std::move(alternatives));
}

void atom_params(const ResidualPred& r, std::vector<std::string>& out) {
    if (r.kind == ResidualPred::Kind::Atom) out.push_back(r.param);
    for (const ResidualPred& c : r.children) atom_params(c, out);
}

}  // namespace

Policy apply_adjustments(const Policy& p, const std::vector<Adjustment>& adjustments) {
    std::map<std::string, double> values;
    for (const Adjustment& a : adjustments) values[a.name] = a.new_value;
    Policy out = p;
    for (Branch& b : out.branches) b.guard = set_params(b.guard, values);
    return out;
}

RepairResult repair(const Policy& input, const std::vector<Demonstration>& corrections, const SolveOptions& opts) {
    RepairResult result;
    const Policy p = number_params(input);
    result.policy = p;

    for (std::size_t i = 0; i < corrections.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (corrections[i].world == corrections[j].world && corrections[i].next_action != corrections[j].next_action) {
                result.reason = "corrections " + std::to_string(j) + " and " + std::to_string(i) +
                                " label the same world differently";
                return result;
            }
        }
    }

    std::vector<std::pair<std::string, double>> params;
    for (const Branch& b : p.branches) collect_params(b.guard, params);

    std::vector<ResidualPred> constraints;
    for (std::size_t i = 0; i < corrections.size(); ++i) {
        ResidualPred r = selects(p, corrections[i].world, corrections[i].next_action);
        if (r.is_false()) {
            result.reason = "correction " + std::to_string(i) + " cannot be produced by any adjustment";
            return result;
        }
        if (!r.is_true()) constraints.push_back(std::move(r));
    }

    // Holes that never share a constraint are solved separately; the summed
    // objective makes that exact.
    std::vector<std::string> names;
    for (const auto& [n, v] : params) names.push_back(n);
    std::vector<int> parent(names.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto index_of = [&](const std::string& n) {
        return static_cast<int>(std::find(names.begin(), names.end(), n) - names.begin());
    };
    std::vector<std::vector<std::string>> cons_params(constraints.size());
    for (std::size_t c = 0; c < constraints.size(); ++c) {
        atom_params(constraints[c], cons_params[c]);
        for (std::size_t k = 1; k < cons_params[c].size(); ++k)
            parent[find(index_of(cons_params[c][k]))] = find(index_of(cons_params[c][0]));
    }

    std::map<std::string, double> delta;
    for (const std::string& n : names) delta[n] = 0.0;
    SolveOptions o = opts;
    o.objective = Objective::MinAbsSum;
    o.include_zero = true;
    // Adjustments beyond a constraint step by half the parameter's own size
    // rather than by a fixed half unit.
    for (const auto& [n, v] : params) o.ray_unit[n] = v != 0.0 ? std::fabs(v) : 1.0;
    std::map<int, ParamConstraintSystem> components;
    for (std::size_t c = 0; c < constraints.size(); ++c) {
        if (cons_params[c].empty()) continue;
        components[find(index_of(cons_params[c][0]))].must_hold.push_back(constraints[c]);
    }
    for (auto& [root, sys] : components) {
        SolveResult r = solve(sys, o);
        if (!r.sat) {
            result.reason = "no adjustment satisfies every correction";
            return result;
        }
        for (const auto& [n, v] : r.assignment) delta[n] = v;
    }

    for (const auto& [n, v] : params) result.adjustments.push_back({n, v, delta[n], v + delta[n]});
    result.policy = apply_adjustments(p, result.adjustments);
    for (std::size_t i = 0; i < corrections.size(); ++i) {
        if (eval_policy(result.policy, corrections[i].world) != corrections[i].next_action) {
            result.reason = "correction " + std::to_string(i) + " lies within rounding distance of a threshold";
            return result;
        }
    }
    result.sat = true;
    return result;
}

}  // namespace ldips
