#include "ldips/enumerate.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <optional>
#include <unordered_map>

#include <omp.h>

namespace ldips {

bool signature_equal(const Signature& a, const Signature& b, double tol) {
    if (a.is_vector != b.is_vector || a.size() != b.size() || a.error != b.error) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.error[i]) continue;
        if (!(std::fabs(a.x[i] - b.x[i]) <= tol)) return false;
        if (a.is_vector && !(std::fabs(a.y[i] - b.y[i]) <= tol)) return false;
    }
    return true;
}

std::string to_string(PruningMode m) {
    switch (m) {
    case PruningMode::Full:
        return "full";
    case PruningMode::DimensionOnly:
        return "dimension-only";
    case PruningMode::SignatureOnly:
        return "signature-only";
    case PruningMode::None:
        return "none";
    }
    return "?";
}

bool uses_dimensions(PruningMode m) { return m == PruningMode::Full || m == PruningMode::DimensionOnly; }
bool uses_signatures(PruningMode m) { return m == PruningMode::Full || m == PruningMode::SignatureOnly; }

bool TargetPattern::matches(const ValueType& t, bool compare_dims) const {
    if (any_scalar) return t.is_scalar();
    if (t.kind != type.kind) return false;
    return !compare_dims || t.dim == type.dim;
}

namespace {

struct Job {
    const OpSignature* op;
    int a;
    int b;  // -1 for unary
    ValueType type;
};

// Child signatures are combined pointwise, so no tree is re-evaluated.
Signature apply(const OpSignature& op, const Signature& a, const Signature* b, bool vector_result) {
    const std::size_t n = a.size();
    Signature s;
    s.is_vector = vector_result;
    s.x.assign(n, 0.0);
    if (vector_result) s.y.assign(n, 0.0);
    s.error.assign(n, 0);
    std::array<Value, 2> args{};
    const std::size_t arity = b ? 2 : 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (a.error[i] || (b && b->error[i])) {
            s.error[i] = 1;
            s.any_error = true;
            continue;
        }
        args[0] = a.at(i);
        if (b) args[1] = b->at(i);
        std::optional<Value> r = op.eval(std::span<const Value>(args.data(), arity));
        if (!r) {
            s.error[i] = 1;
            s.any_error = true;
            continue;
        }
        s.x[i] = r->x;
        if (vector_result) s.y[i] = r->y;
    }
    return s;
}

class Dedupe {
public:
    Dedupe(double tol, std::size_t n, bool by_dims) : tol_(tol), by_dims_(by_dims) {
        // Fixed pseudo-random projection weights in [0.5, 1.5).
        std::uint64_t state = 0x9E3779B97F4A7C15ull;
        weights_.resize(2 * n);
        double total = 0.0;
        for (double& w : weights_) {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            w = 0.5 + static_cast<double>(state >> 11) / 9007199254740992.0;
            total += w;
        }
        width_ = tol > 0.0 ? 4.0 * tol * std::max(total, 1.0) : 0.0;
    }

    // Returns true when `s` is new (and records it as a representative).
    bool insert(const ValueType& t, const Signature& s, int index, const std::vector<const Signature*>& reps) {
        const std::uint64_t base = base_key(t, s);
        const double h = projection(s);
        std::optional<std::int64_t> bucket = bucket_of(h);
        if (!bucket) {
            const std::uint64_t key = mix(base ^ 0xABCDEFull, std::bit_cast<std::uint64_t>(h));
            if (matches(key, t, s, reps)) return false;
            table_[key].push_back(index);
            types_.emplace(index, t);
            return true;
        }
        for (std::int64_t d = -1; d <= 1; ++d)
            if (matches(mix(base, static_cast<std::uint64_t>(*bucket + d)), t, s, reps)) return false;
        table_[mix(base, static_cast<std::uint64_t>(*bucket))].push_back(index);
        types_.emplace(index, t);
        return true;
    }

private:
    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        std::uint64_t h = a ^ (b + 0x9E3779B97F4A7C15ull + (a << 6) + (a >> 2));
        h ^= h >> 33;
        h *= 0xff51afd7ed558ccdull;
        h ^= h >> 33;
        return h;
    }

    std::uint64_t base_key(const ValueType& t, const Signature& s) const {
        std::uint64_t k = static_cast<std::uint64_t>(t.kind) + 1;
        if (by_dims_)
            for (int e : t.dim.exponents) k = mix(k, static_cast<std::uint64_t>(e + 1000));
        if (s.any_error)
            for (std::size_t i = 0; i < s.error.size(); ++i)
                if (s.error[i]) k = mix(k, i + 7);
        return k;
    }

    double projection(const Signature& s) const {
        double h = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s.error[i]) continue;
            h += weights_[2 * i] * s.x[i];
            if (s.is_vector) h += weights_[2 * i + 1] * s.y[i];
        }
        return h;
    }

    std::optional<std::int64_t> bucket_of(double h) const {
        if (width_ <= 0.0 || !std::isfinite(h)) return std::nullopt;
        const double q = std::floor(h / width_);
        if (!(std::fabs(q) < 4e18)) return std::nullopt;
        return static_cast<std::int64_t>(q);
    }

    bool matches(std::uint64_t key, const ValueType& t, const Signature& s,
                 const std::vector<const Signature*>& reps) const {
        auto it = table_.find(key);
        if (it == table_.end()) return false;
        for (int idx : it->second) {
            const ValueType& rt = types_.at(idx);
            if (rt.kind != t.kind || (by_dims_ && rt.dim != t.dim)) continue;
            if (signature_equal(*reps[idx], s, tol_)) return true;
        }
        return false;
    }

    double tol_;
    bool by_dims_;
    double width_ = 0.0;
    std::vector<double> weights_;
    std::unordered_map<std::uint64_t, std::vector<int>> table_;
    std::unordered_map<int, ValueType> types_;
};

Signature leaf_signature(const Value* constant, const std::string& name, bool is_vector,
                         const std::vector<WorldState>& examples) {
    Signature s;
    s.is_vector = is_vector;
    const std::size_t n = examples.size();
    s.x.assign(n, 0.0);
    if (is_vector) s.y.assign(n, 0.0);
    s.error.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        Value v;
        if (constant) {
            v = *constant;
        } else {
            auto it = examples[i].bindings.find(name);
            if (it == examples[i].bindings.end()) {
                s.error[i] = 1;
                s.any_error = true;
                continue;
            }
            v = it->second;
        }
        s.x[i] = v.x;
        if (is_vector) s.y[i] = v.y;
    }
    return s;
}

}  // namespace

std::vector<Candidate> enum_features(const EnumConfig& cfg, const TypeEnv& env, const TargetPattern& target,
                                     const std::vector<WorldState>& examples) {
    std::vector<Candidate> bank;
    if (cfg.max_depth < 1) return bank;

    const bool dims = uses_dimensions(cfg.mode);
    const bool sigs = uses_signatures(cfg.mode);
    Dedupe dedupe(cfg.tolerance, examples.size(), dims);
    std::vector<const Signature*> rep_sigs;  // indexed like bank; stable after reserve below

    auto admit = [&](Candidate c) {
        if (sigs && !dedupe.insert(c.type, c.sig, static_cast<int>(bank.size()), rep_sigs)) return;
        bank.push_back(std::move(c));
        rep_sigs.clear();
        for (const Candidate& k : bank) rep_sigs.push_back(&k.sig);
    };

    // Depth 1: inputs, then registered constants.
    for (const InputDecl& in : env.inputs)
        admit({Expr::var(in.name, in.type), in.type, 1, leaf_signature(nullptr, in.name, in.type.is_vector(), examples)});
    for (const ConstantDecl& c : env.constants) {
        const Value v = Value::scalar(c.value);
        const ValueType t = ValueType::scalar(c.dim);
        admit({Expr::constant(v, t), t, 1, leaf_signature(&v, {}, false, examples)});
    }

    std::size_t prev_begin = 0;
    for (int depth = 2; depth <= cfg.max_depth; ++depth) {
        const std::size_t prev_end = bank.size();
        // Operand pairs whose taller side has height exactly depth-1.
        std::vector<Job> jobs;
        for (const OpSignature& op : env.ops.ops()) {
            const auto& rule = dims ? op.type_rule : op.shape_rule;
            if (op.arity == 1) {
                for (std::size_t a = prev_begin; a < prev_end; ++a) {
                    std::array<ValueType, 1> t{bank[a].type};
                    if (auto r = rule(t)) jobs.push_back({&op, static_cast<int>(a), -1, *r});
                }
            } else {
                for (std::size_t a = 0; a < prev_end; ++a) {
                    for (std::size_t b = 0; b < prev_end; ++b) {
                        if (a < prev_begin && b < prev_begin) continue;
                        std::array<ValueType, 2> t{bank[a].type, bank[b].type};
                        if (auto r = rule(t)) jobs.push_back({&op, static_cast<int>(a), static_cast<int>(b), *r});
                    }
                }
            }
        }

        std::vector<Signature> computed(jobs.size());
        auto compute = [&](std::size_t j) {
            const Job& job = jobs[j];
            computed[j] = apply(*job.op, bank[job.a].sig, job.b >= 0 ? &bank[job.b].sig : nullptr,
                                job.type.is_vector());
        };
        if (cfg.kernel == Kernel::Parallel) {
            const int threads = cfg.jobs > 0 ? cfg.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 32) num_threads(threads)
            for (std::size_t j = 0; j < jobs.size(); ++j) compute(j);
        } else {
            for (std::size_t j = 0; j < jobs.size(); ++j) compute(j);
        }

        bank.reserve(bank.size() + jobs.size());
        rep_sigs.clear();
        for (const Candidate& k : bank) rep_sigs.push_back(&k.sig);
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            const Job& job = jobs[j];
            if (sigs && !dedupe.insert(job.type, computed[j], static_cast<int>(bank.size()), rep_sigs)) continue;
            Expr e = job.b >= 0 ? Expr::binary(job.op->name, bank[job.a].expr, bank[job.b].expr)
                                : Expr::unary(job.op->name, bank[job.a].expr);
            bank.push_back({std::move(e), job.type, depth, std::move(computed[j])});
            rep_sigs.push_back(&bank.back().sig);
        }
        prev_begin = prev_end;
    }

    std::vector<Candidate> out;
    for (Candidate& c : bank)
        if (target.matches(c.type, dims)) out.push_back(std::move(c));
    return out;
}

std::vector<CountRow> enum_count_report(const std::vector<EnumConfig>& cfgs, const TypeEnv& env,
                                        const std::vector<WorldState>& examples) {
    std::vector<CountRow> rows;
    for (const EnumConfig& cfg : cfgs) {
        std::vector<Candidate> all = enum_features(cfg, env, TargetPattern::scalar_any(), examples);
        for (int d = 1; d <= cfg.max_depth; ++d) {
            std::size_t n = 0;
            for (const Candidate& c : all)
                if (c.depth <= d) ++n;
            rows.push_back({cfg.mode, d, n});
        }
    }
    return rows;
}

}  // namespace ldips
