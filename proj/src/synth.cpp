#include "ldips/synth.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <iterator>
#include <limits>
#include <numeric>
#include <map>
#include <stdexcept>

#include "ldips/errors.hpp"
#include "ldips/printer.hpp"

namespace ldips {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool type_fits(const std::optional<ValueType>& want, const ValueType& have) {
    if (!want) return have.is_scalar();
    return *want == have;
}

}  // namespace

EnumConfig SynthConfig::enum_config() const {
    EnumConfig c;
    c.max_depth = max_depth;
    c.mode = mode;
    c.tolerance = tolerance;
    c.kernel = kernel;
    c.jobs = jobs;
    return c;
}

SolveOptions SynthConfig::solve_options() const {
    SolveOptions o;
    o.capacity = capacity;
    o.kernel = kernel;
    o.jobs = jobs;
    return o;
}

FillStream::FillStream(const Pred& b, const std::vector<Candidate>& candidates, bool skip_errors)
    : b_(b), candidates_(&candidates), holes_(collect_holes(b).exprs) {
    for (const ExprHoleInfo& h : holes_) {
        std::vector<std::size_t> opts;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (skip_errors && candidates[i].sig.any_error) continue;
            if (type_fits(h.type, candidates[i].type)) opts.push_back(i);
        }
        if (opts.empty())
            throw EmptyCandidates(h.name, "no candidate expression of type " +
                                              (h.type ? to_string(*h.type) : std::string("scalar")) + " for ?" +
                                              h.name);
        options_.push_back(std::move(opts));
    }
    pos_.assign(holes_.size(), 0);
}

double FillStream::size() const {
    double n = 1.0;
    for (const auto& o : options_) n *= static_cast<double>(o.size());
    return n;
}

std::optional<Pred> FillStream::next() {
    if (done_) return std::nullopt;
    if (started_) {
        std::size_t h = holes_.size();
        bool carry = true;
        while (h > 0 && carry) {
            --h;
            if (++pos_[h] < options_[h].size())
                carry = false;
            else
                pos_[h] = 0;
        }
        if (carry) {
            done_ = true;
            return std::nullopt;
        }
    }
    started_ = true;
    chosen_.resize(holes_.size());
    std::vector<ExprFill> fills;
    for (std::size_t h = 0; h < holes_.size(); ++h) {
        chosen_[h] = options_[h][pos_[h]];
        const Candidate& c = (*candidates_)[chosen_[h]];
        fills.push_back({holes_[h].name, c.expr, c.type});
    }
    return fills.empty() ? b_ : fill_expr_holes(b_, fills);
}

FillStream fill_expressions(const Pred& b, const std::vector<Candidate>& candidates) {
    return FillStream(b, candidates);
}

namespace {

// Skeletons of the form  atom | op(atom, chain)  with blank expressions and
// blank thresholds admit an exact feasibility test without the solver: the
// first atom can always sit at its boundary, since a threshold that keeps
// every row it must keep is best placed as far as those rows allow. Under
// `and` the atom must be true on all positives, so it rejects every negative
// strictly beyond the positives' extreme; under `or` it must be false on
// every negative and accepts the positives beyond their extreme. The rest of
// the chain inherits what is left. Thresholds come from a grid with a point
// strictly between any two distinct row values, so strict comparisons of row
// values decide each step.
struct Link {
    bool gt = true;
    PredKind op = PredKind::True;  // And/Or joining this atom to the rest; True for the last atom
};

std::optional<std::vector<Link>> as_chain(const Pred& b) {
    std::vector<Link> out;
    const Pred* cur = &b;
    for (;;) {
        auto atom = [](const Pred& p) -> std::optional<Link> {
            if (p.kind() != PredKind::Lt && p.kind() != PredKind::Gt) return std::nullopt;
            if (p.expr().kind() != ExprKind::Hole || p.expr().declared_type() || !p.threshold().is_hole)
                return std::nullopt;
            return Link{p.kind() == PredKind::Gt, PredKind::True};
        };
        if (auto a = atom(*cur)) {
            out.push_back(*a);
            return out;
        }
        if (cur->kind() != PredKind::And && cur->kind() != PredKind::Or) return std::nullopt;
        auto a = atom(cur->lhs());
        if (!a) return std::nullopt;
        a->op = cur->kind();
        out.push_back(*a);
        cur = &cur->rhs();
    }
}

using Rows = std::vector<std::uint32_t>;

class ChainSearch {
public:
    ChainSearch(const std::vector<Link>& chain, const std::vector<Candidate>& features,
                const std::vector<std::vector<std::size_t>>& options, std::size_t rows)
        : chain_(chain), features_(features), options_(options), rows_(rows) {}

    // First choice in odometer order (last hole fastest) that admits thresholds.
    std::optional<std::vector<std::size_t>> run(const Rows& pos, const Rows& neg) {
        choice_.assign(chain_.size(), 0);
        if (search(0, pos, neg)) return choice_;
        return std::nullopt;
    }

    std::size_t checked() const { return checked_; }

private:
    double value(std::size_t cand, std::uint32_t row) const { return features_[cand].sig.x[row]; }

    // min and max over a row set; empty sets give (+inf, -inf).
    std::pair<double, double> extent(std::size_t cand, const Rows& rows) const {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::uint32_t r : rows) {
            const double v = value(cand, r);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return {lo, hi};
    }

    bool separates(std::size_t cand, bool gt, const Rows& pos, const Rows& neg) const {
        if (pos.empty() || neg.empty()) return true;
        auto [plo, phi] = extent(cand, pos);
        auto [nlo, nhi] = extent(cand, neg);
        return gt ? nhi < plo : phi < nlo;
    }

    // Rows of `target` the atom settles when placed at its boundary against `keep`:
    // under `and`, negatives it rejects; under `or`, positives it accepts.
    Rows settled(std::size_t cand, bool gt, const Rows& keep, const Rows& target) const {
        auto [lo, hi] = extent(cand, keep);
        Rows out;
        for (std::uint32_t r : target) {
            const double v = value(cand, r);
            const bool beyond = keep.empty() || (gt ? v < lo : v > hi);
            if (beyond) out.push_back(r);
        }
        return out;
    }

    static Rows minus(const Rows& a, const Rows& b) {
        Rows out;
        std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
        return out;
    }

    bool search(std::size_t level, const Rows& pos, const Rows& neg) {
        const Link& link = chain_[level];
        if (level + 1 == chain_.size()) {
            for (std::size_t c : options_[level]) {
                ++checked_;
                if (separates(c, link.gt, pos, neg)) {
                    choice_[level] = c;
                    return true;
                }
            }
            return false;
        }
        if (level + 2 == chain_.size()) return pair(level, pos, neg);
        for (std::size_t c : options_[level]) {
            choice_[level] = c;
            const bool conj = link.op == PredKind::And;
            const Rows done = conj ? settled(c, link.gt, pos, neg) : settled(c, !link.gt, neg, pos);
            const bool ok = conj ? search(level + 1, pos, minus(neg, done)) : search(level + 1, minus(pos, done), neg);
            if (ok) return true;
        }
        return false;
    }

    // The last two atoms: each one's settled set depends only on the rows
    // handed down, so the pair is feasible iff the two sets cover the target.
    bool pair(std::size_t level, const Rows& pos, const Rows& neg) {
        const bool conj = chain_[level].op == PredKind::And;
        const Rows& keep = conj ? pos : neg;
        const Rows& target = conj ? neg : pos;
        const std::size_t words = (target.size() + 63) / 64;
        std::vector<std::uint32_t> slot(rows_, 0);
        for (std::size_t i = 0; i < target.size(); ++i) slot[target[i]] = static_cast<std::uint32_t>(i);

        auto masks = [&](std::size_t lv) {
            const bool gt = conj ? chain_[lv].gt : !chain_[lv].gt;
            std::vector<std::uint64_t> m(options_[lv].size() * words, 0);
            for (std::size_t k = 0; k < options_[lv].size(); ++k) {
                for (std::uint32_t r : settled(options_[lv][k], gt, keep, target))
                    m[k * words + slot[r] / 64] |= std::uint64_t{1} << (slot[r] % 64);
            }
            return m;
        };
        const std::vector<std::uint64_t> first = masks(level);
        const std::vector<std::uint64_t> second = masks(level + 1);
        std::vector<std::uint64_t> full(words, ~std::uint64_t{0});
        if (words && target.size() % 64) full.back() = (std::uint64_t{1} << (target.size() % 64)) - 1;

        for (std::size_t i = 0; i < options_[level].size(); ++i) {
            for (std::size_t j = 0; j < options_[level + 1].size(); ++j) {
                ++checked_;
                bool covered = true;
                for (std::size_t w = 0; w < words && covered; ++w)
                    covered = (first[i * words + w] | second[j * words + w]) == full[w];
                if (covered) {
                    choice_[level] = options_[level][i];
                    choice_[level + 1] = options_[level + 1][j];
                    return true;
                }
            }
        }
        return false;
    }

    const std::vector<Link>& chain_;
    const std::vector<Candidate>& features_;
    const std::vector<std::vector<std::size_t>>& options_;
    std::size_t rows_;
    std::vector<std::size_t> choice_;
    std::size_t checked_ = 0;
};

}  // namespace

std::optional<Pred> l2_with(const SynthConfig& cfg, const std::vector<Candidate>& features,
                            const std::vector<WorldState>& pos, const std::vector<WorldState>& neg, const Pred& b,
                            SynthStats* stats) {
    if (!collect_holes(b).preds.empty()) throw std::invalid_argument("l2: predicate still has blank predicates");
    for (const WorldState& p : pos)
        for (const WorldState& n : neg)
            if (p == n) return std::nullopt;

    std::optional<FillStream> stream;
    try {
        stream.emplace(b, features, true);
    } catch (const EmptyCandidates&) {
        return std::nullopt;
    }

    std::vector<std::pair<std::string, Value>> overlay;
    for (const ExprHoleInfo& h : stream->holes()) overlay.emplace_back(h.name, Value{});

    BuildOptions bo;
    bo.stop_at_contradiction = true;
    bo.expr_values = [&](bool positive, std::size_t i) {
        const std::size_t row = positive ? i : pos.size() + i;
        for (std::size_t h = 0; h < overlay.size(); ++h) overlay[h].second = features[stream->choice()[h]].sig.at(row);
        return &overlay;
    };
    const SolveOptions so = cfg.solve_options();

    const SolveOptions so_fast = cfg.solve_options();
    std::optional<std::vector<Link>> chain = as_chain(b);
    if (chain && chain->size() == stream->holes().size()) {
        Rows p(pos.size()), n(neg.size());
        std::iota(p.begin(), p.end(), 0u);
        std::iota(n.begin(), n.end(), static_cast<std::uint32_t>(pos.size()));
        ChainSearch search(*chain, features, stream->options(), pos.size() + neg.size());
        std::optional<std::vector<std::size_t>> pick = search.run(p, n);
        if (stats) stats->fills += search.checked();
        if (!pick) return std::nullopt;
        for (std::size_t h = 0; h < overlay.size(); ++h) overlay[h].second = Value{};
        bo.expr_values = [&](bool positive, std::size_t i) {
            const std::size_t row = positive ? i : pos.size() + i;
            for (std::size_t h = 0; h < overlay.size(); ++h) overlay[h].second = features[(*pick)[h]].sig.at(row);
            return &overlay;
        };
        if (stats) ++stats->solver_calls;
        SolveResult r = solve(build_system(b, pos, neg, bo), so_fast);
        if (!r.sat) throw std::logic_error("l2: boundary test and solver disagree");
        std::vector<ExprFill> fills;
        for (std::size_t h = 0; h < overlay.size(); ++h) {
            const Candidate& c = features[(*pick)[h]];
            fills.push_back({overlay[h].first, c.expr, c.type});
        }
        return fill_params(fill_expr_holes(b, fills), r.assignment);
    }

    while (stream->next()) {
        if (stats) ++stats->fills;
        ParamConstraintSystem sys = build_system(b, pos, neg, bo);
        if (!sys.contradictions.empty()) continue;
        if (stats) ++stats->solver_calls;
        SolveResult r = solve(sys, so);
        if (!r.sat) continue;
        std::vector<ExprFill> fills;
        for (std::size_t h = 0; h < overlay.size(); ++h) {
            const Candidate& c = features[stream->choice()[h]];
            fills.push_back({overlay[h].first, c.expr, c.type});
        }
        return fill_params(fill_expr_holes(b, fills), r.assignment);
    }
    return std::nullopt;
}

std::optional<Pred> l2(const SynthConfig& cfg, const TypeEnv& env, const std::vector<WorldState>& pos,
                       const std::vector<WorldState>& neg, const Pred& b, SynthStats* stats) {
    std::vector<WorldState> examples = pos;
    examples.insert(examples.end(), neg.begin(), neg.end());
    auto t0 = Clock::now();
    std::vector<Candidate> features = enum_features(cfg.enum_config(), env, TargetPattern::scalar_any(), examples);
    if (stats) {
        stats->enumeration_seconds += seconds_since(t0);
        stats->features += features.size();
    }
    t0 = Clock::now();
    auto r = l2_with(cfg, features, pos, neg, b, stats);
    if (stats) stats->solving_seconds += seconds_since(t0);
    return r;
}

std::vector<SubProblem> divide_problem(const std::vector<Demonstration>& demos, const DomainDef& domain) {
    std::vector<std::string> starts;
    for (const Demonstration& d : demos)
        if (std::find(starts.begin(), starts.end(), d.start_action) == starts.end()) starts.push_back(d.start_action);

    std::vector<SubProblem> out;
    for (const std::string& s : starts) {
        std::map<std::string, std::size_t> counts;
        for (const Demonstration& d : demos)
            if (d.start_action == s) ++counts[d.next_action];
        std::vector<std::pair<std::string, std::size_t>> targets;
        for (const auto& [t, n] : counts)
            if (t != domain.default_action) targets.emplace_back(t, n);
        std::stable_sort(targets.begin(), targets.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        for (const auto& [t, n] : targets) {
            SubProblem sp{s, t, {}, {}};
            for (const Demonstration& d : demos) {
                if (d.start_action != s) continue;
                (d.next_action == t ? sp.positives : sp.negatives).push_back(d.world);
            }
            out.push_back(std::move(sp));
        }
    }
    return out;
}

PredicateStream::PredicateStream(int max_atoms, std::string prefix) : prefix_(std::move(prefix)) {
    if (max_atoms < 1) return;
    shapes_.push_back({0});
    shapes_.push_back({1});
    for (int n = 2; n <= max_atoms; ++n) {
        const std::size_t existing = shapes_.size();
        for (int kind : {2, 3}) {
            for (int l = 1; l < n; ++l) {
                for (std::size_t a = 0; a < existing; ++a) {
                    if (shapes_[a].atoms != l) continue;
                    for (std::size_t b = a; b < existing; ++b) {
                        if (shapes_[b].atoms != n - l) continue;
                        shapes_.push_back({kind, static_cast<int>(a), static_cast<int>(b), n});
                    }
                }
            }
        }
    }
}

Pred PredicateStream::instantiate(int shape, int& counter) const {
    const Shape& s = shapes_[shape];
    if (s.kind <= 1) {
        ++counter;
        const std::string n = std::to_string(counter);
        Expr e = Expr::hole(prefix_ + "e" + n);
        Threshold t = Threshold::hole(prefix_ + "p" + n, std::nullopt);
        return s.kind == 0 ? Pred::gt(e, t) : Pred::lt(e, t);
    }
    Pred l = instantiate(s.left, counter);
    Pred r = instantiate(s.right, counter);
    return s.kind == 2 ? Pred::conj(l, r) : Pred::disj(l, r);
}

std::optional<Pred> PredicateStream::next() {
    if (next_ >= shapes_.size()) return std::nullopt;
    int counter = 0;
    return instantiate(static_cast<int>(next_++), counter);
}

PredicateStream enum_predicates(int max_atoms, std::string prefix) { return PredicateStream(max_atoms, std::move(prefix)); }

Policy make_policy(const std::vector<SubProblem>& subproblems, const std::vector<Pred>& guards,
                   const DomainDef& domain) {
    Policy p;
    for (std::size_t i = 0; i < subproblems.size(); ++i) p.branches.push_back({guards[i], subproblems[i].target});
    p.fallback = domain.default_action;
    return number_params(p);
}

namespace {

std::string describe(const SubProblem& sp) {
    return sp.start + " -> " + sp.target + " (" + std::to_string(sp.positives.size()) + " positive, " +
           std::to_string(sp.negatives.size()) + " negative)";
}

// First demonstration the policy mislabels, or -1.
long first_violation(const Policy& p, const std::vector<Demonstration>& demos) {
    for (std::size_t i = 0; i < demos.size(); ++i) {
        try {
            if (eval_policy(p, demos[i].world) != demos[i].next_action) return static_cast<long>(i);
        } catch (const EvalError&) {
            return static_cast<long>(i);
        }
    }
    return -1;
}

SynthResult from_demos(const SynthConfig& cfg, const std::vector<Demonstration>& demos, const DomainDef& domain,
                       const TypeEnv& env) {
    SynthResult res;
    const std::vector<SubProblem> subs = divide_problem(demos, domain);
    std::vector<Pred> guards;
    for (const SubProblem& sp : subs) {
        std::vector<WorldState> examples = sp.positives;
        examples.insert(examples.end(), sp.negatives.begin(), sp.negatives.end());
        auto t0 = Clock::now();
        const std::vector<Candidate> features =
            enum_features(cfg.enum_config(), env, TargetPattern::scalar_any(), examples);
        res.stats.enumeration_seconds += seconds_since(t0);
        res.stats.features += features.size();

        t0 = Clock::now();
        std::optional<Pred> found;
        PredicateStream skeletons(cfg.max_atoms);
        while (auto sk = skeletons.next()) {
            ++res.stats.skeletons;
            found = l2_with(cfg, features, sp.positives, sp.negatives, *sk, &res.stats);
            if (found) break;
        }
        res.stats.solving_seconds += seconds_since(t0);
        if (!found) {
            res.reason = "no predicate separates " + describe(sp);
            return res;
        }
        guards.push_back(Pred::conj(Pred::action_eq(ActionRef::start(), ActionRef::named(sp.start)), *found));
    }
    auto t0 = Clock::now();
    res.policy = make_policy(subs, guards, domain);
    const long bad = first_violation(res.policy, demos);
    res.stats.assembly_seconds += seconds_since(t0);
    if (bad >= 0) {
        res.reason = "assembled policy mislabels demonstration " + std::to_string(bad);
        return res;
    }
    res.sat = true;
    return res;
}

// Every atom that still has a blank becomes true. Guards have no negation,
// so this accepts everything any completion could.
Pred optimistic(const Pred& p) {
    switch (p.kind()) {
    case PredKind::Hole:
        return Pred::truth(true);
    case PredKind::Lt:
    case PredKind::Gt:
        return has_holes(p) ? Pred::truth(true) : p;
    case PredKind::And:
        return Pred::conj(optimistic(p.lhs()), optimistic(p.rhs()));
    case PredKind::Or:
        return Pred::disj(optimistic(p.lhs()), optimistic(p.rhs()));
    default:
        return p;
    }
}

// Tries every combination of skeletons for the blank predicates in `guard`.
std::optional<Pred> fill_pred_holes(const SynthConfig& cfg, const std::vector<Candidate>& features,
                                    const std::vector<WorldState>& pos, const std::vector<WorldState>& neg,
                                    const Pred& guard, const std::vector<std::string>& pred_holes, std::size_t k,
                                    SynthStats& stats) {
    if (k == pred_holes.size()) return l2_with(cfg, features, pos, neg, guard, &stats);
    PredicateStream skeletons(cfg.max_atoms, pred_holes[k] + "_");
    while (auto sk = skeletons.next()) {
        ++stats.skeletons;
        Pred g = replace_pred_hole(guard, pred_holes[k], *sk);
        if (auto r = fill_pred_holes(cfg, features, pos, neg, g, pred_holes, k + 1, stats)) return r;
    }
    return std::nullopt;
}

SynthResult from_sketch(const SynthConfig& cfg, const std::vector<Demonstration>& demos, const Policy& sketch,
                        const TypeEnv& env) {
    SynthResult res;
    Policy out;
    out.fallback = sketch.fallback;
    std::vector<std::size_t> reaching(demos.size());
    for (std::size_t i = 0; i < demos.size(); ++i) reaching[i] = i;

    for (std::size_t bi = 0; bi < sketch.branches.size(); ++bi) {
        const Branch& br = sketch.branches[bi];
        Pred guard = br.guard;
        if (has_holes(guard)) {
            std::vector<WorldState> pos;
            std::vector<WorldState> neg;
            // Demonstrations of this action that no completion could accept
            // are left for later branches.
            const Pred reach = optimistic(guard);
            for (std::size_t i : reaching) {
                if (demos[i].next_action != br.action) {
                    neg.push_back(demos[i].world);
                    continue;
                }
                bool possible = false;
                try {
                    possible = eval_pred(reach, demos[i].world);
                } catch (const EvalError&) {
                }
                if (possible) pos.push_back(demos[i].world);
            }
            const HoleSet hs = collect_holes(guard);
            std::vector<Candidate> features;
            if (!hs.exprs.empty() || !hs.preds.empty()) {
                std::vector<WorldState> examples = pos;
                examples.insert(examples.end(), neg.begin(), neg.end());
                auto t0 = Clock::now();
                features = enum_features(cfg.enum_config(), env, TargetPattern::scalar_any(), examples);
                res.stats.enumeration_seconds += seconds_since(t0);
                res.stats.features += features.size();
            }
            auto t0 = Clock::now();
            std::optional<Pred> g = fill_pred_holes(cfg, features, pos, neg, guard, hs.preds, 0, res.stats);
            res.stats.solving_seconds += seconds_since(t0);
            if (!g) {
                res.reason = "no completion of branch " + std::to_string(bi + 1) + " (" + br.action + ") separates " +
                             std::to_string(pos.size()) + " positive from " + std::to_string(neg.size()) +
                             " negative demonstrations";
                return res;
            }
            guard = *g;
        }
        std::vector<std::size_t> rest;
        for (std::size_t i : reaching) {
            bool taken = false;
            try {
                taken = eval_pred(guard, demos[i].world);
            } catch (const EvalError& e) {
                res.reason = "branch " + std::to_string(bi + 1) + " fails on demonstration " + std::to_string(i) +
                             ": " + e.what();
                return res;
            }
            if (!taken) rest.push_back(i);
        }
        reaching = std::move(rest);
        out.branches.push_back({guard, br.action});
    }

    auto t0 = Clock::now();
    res.policy = number_params(out);
    const long bad = first_violation(res.policy, demos);
    res.stats.assembly_seconds += seconds_since(t0);
    if (bad >= 0) {
        res.reason = "sketch structure cannot label demonstration " + std::to_string(bad) + " (" +
                     demos[bad].start_action + " -> " + demos[bad].next_action + ")";
        return res;
    }
    res.sat = true;
    return res;
}

}  // namespace

SynthResult l3(const SynthConfig& cfg, const std::vector<Demonstration>& demos, const DomainDef& domain,
               const std::optional<Policy>& sketch) {
    const TypeEnv env = make_env(domain);
    if (sketch) return from_sketch(cfg, demos, *sketch, env);
    return from_demos(cfg, demos, domain, env);
}

}  // namespace ldips
