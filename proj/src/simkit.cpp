#include "ldips/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <omp.h>

#include "ldips/errors.hpp"
#include "ldips/printer.hpp"

namespace ldips {

namespace {

struct V2 {
    double x = 0.0;
    double y = 0.0;
};

V2 operator+(V2 a, V2 b) { return {a.x + b.x, a.y + b.y}; }
V2 operator-(V2 a, V2 b) { return {a.x - b.x, a.y - b.y}; }
V2 operator*(double k, V2 a) { return {k * a.x, k * a.y}; }
double len(V2 a) { return std::hypot(a.x, a.y); }

V2 clip(V2 a, double max_len) {
    const double l = len(a);
    return l > max_len ? (max_len / l) * a : a;
}

V2 from(Value v) { return {v.x, v.y}; }
Value to_value(V2 v) { return Value::vec(v.x, v.y); }

// Fraction of the initial velocity's travel accumulated after time t under drag mu.
double drift(double mu, double t) { return mu > 0.0 ? (1.0 - std::exp(-mu * t)) / mu : t; }

struct Sim {
    const SimConfig& cfg;
    V2 pr, vr, pb, vb;

    void step_ball() {
        const double decay = std::exp(-cfg.friction * cfg.dt);
        pb = pb + drift(cfg.friction, cfg.dt) * vb;
        vb = decay * vb;
        // Elastic walls keep the ball on the field.
        if (pb.x > cfg.half_width) {
            pb.x = 2 * cfg.half_width - pb.x;
            vb.x = -vb.x;
        } else if (pb.x < -cfg.half_width) {
            pb.x = -2 * cfg.half_width - pb.x;
            vb.x = -vb.x;
        }
        if (pb.y > cfg.half_height) {
            pb.y = 2 * cfg.half_height - pb.y;
            vb.y = -vb.y;
        } else if (pb.y < -cfg.half_height) {
            pb.y = -2 * cfg.half_height - pb.y;
            vb.y = -vb.y;
        }
    }

    void drive(V2 v_des) {
        v_des = clip(v_des, cfg.robot_speed);
        const V2 acc = clip((1.0 / cfg.dt) * (v_des - vr), cfg.robot_accel);
        vr = clip(vr + cfg.dt * acc, cfg.robot_speed);
        pr = pr + cfg.dt * vr;
    }

    // Distance the robot can cover from rest in time t.
    double reach(double t) const {
        const double t_acc = cfg.robot_speed / cfg.robot_accel;
        if (t < t_acc) return 0.5 * cfg.robot_accel * t * t;
        return cfg.robot_speed * t - 0.5 * cfg.robot_speed * t_acc;
    }

    // Earliest point on the ball's predicted path the robot can reach, by
    // bisection on time.
    V2 intercept() const {
        auto ball_at = [&](double t) { return pb + drift(cfg.planner_friction, t) * vb; };
        auto gap = [&](double t) { return reach(t) - len(ball_at(t) - pr); };
        double lo = 0.0;
        double hi = 4.0;
        if (gap(hi) <= 0.0) return ball_at(hi);
        for (int i = 0; i < 40; ++i) {
            const double mid = 0.5 * (lo + hi);
            (gap(mid) > 0.0 ? hi : lo) = mid;
        }
        return ball_at(hi);
    }

    WorldState world(const std::string& action) const {
        WorldState w;
        w.start_action = action;
        w.bindings["p_r"] = to_value(pr);
        w.bindings["v_r"] = to_value(vr);
        w.bindings["p_b"] = to_value(pb);
        w.bindings["v_b"] = to_value(vb);
        return w;
    }
};

}  // namespace

SimConfig perturb(const SimConfig& cfg, const std::map<std::string, double>& factors) {
    SimConfig out = cfg;
    for (const auto& [k, f] : factors) {
        if (!(f > 0.0)) throw std::invalid_argument("perturbation factor for '" + k + "' must be positive");
        if (k == "friction")
            out.friction *= f;
        else if (k == "accel")
            out.robot_accel *= f;
        else
            throw std::invalid_argument("unknown perturbation '" + k + "' (expected friction or accel)");
    }
    return out;
}

std::string to_string(Outcome o) {
    switch (o) {
    case Outcome::Success:
        return "success";
    case Outcome::Failure:
        return "failure";
    case Outcome::Timeout:
        return "timeout";
    }
    return "?";
}

WorldState make_world(const StartState& s) {
    WorldState w;
    w.start_action = s.action;
    w.bindings["p_r"] = s.p_r;
    w.bindings["v_r"] = s.v_r;
    w.bindings["p_b"] = s.p_b;
    w.bindings["v_b"] = s.v_b;
    return w;
}

Episode run_episode(const Policy& p, const SimConfig& cfg, const StartState& init) {
    Episode ep;
    ep.init = init;
    Sim sim{cfg, from(init.p_r), from(init.v_r), from(init.p_b), from(init.v_b)};
    std::string action = init.action;
    const int windup = static_cast<int>(std::lround(cfg.kick_delay / cfg.dt));

    for (int step = 0; step < cfg.steps; ++step) {
        WorldState w = sim.world(action);
        std::string next;
        try {
            next = eval_policy(p, w);
        } catch (const EvalError&) {
            ep.outcome = Outcome::Failure;
            ep.steps = step;
            return ep;
        }
        ep.trace.emplace_back(std::move(w), next);

        if (next == "Kick") {
            // During the wind-up the robot follows the ball's slowdown as its own
            // drag model predicts it, so a wrong model shows up at the strike.
            const double model_decay = std::exp(-cfg.planner_friction * cfg.dt);
            V2 model_vb = sim.vb;
            for (int k = 0; k < windup; ++k) {
                sim.vr = clip(sim.vr + (model_decay - 1.0) * model_vb, cfg.robot_speed);
                model_vb = model_decay * model_vb;
                sim.pr = sim.pr + cfg.dt * sim.vr;
                sim.step_ball();
            }
            ep.strike_dist = len(sim.pb - sim.pr);
            ep.strike_speed = len(sim.vb - sim.vr);
            const bool close = ep.strike_dist <= cfg.kick_dist;
            const bool matched = ep.strike_speed <= cfg.kick_speed;
            ep.outcome = close && matched ? Outcome::Success : Outcome::Failure;
            ep.steps = step + 1 + windup;
            return ep;
        }
        if (next == "Inter") {
            sim.drive(sim.vb + cfg.inter_gain * (sim.intercept() - sim.pr));
        } else {
            sim.drive(sim.vb + cfg.goto_gain * (sim.pb - sim.pr));
        }
        sim.step_ball();
        action = next;
    }
    ep.outcome = Outcome::Timeout;
    ep.steps = cfg.steps;
    return ep;
}

namespace {

StartState draw(const SimConfig& cfg, std::mt19937_64& rng, double bx, double by) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    StartState s;
    const double angle = 2.0 * M_PI * unit(rng);
    const double speed = cfg.ball_speed_max * unit(rng);
    s.p_b = Value::vec(bx, by);
    s.v_b = Value::vec(speed * std::cos(angle), speed * std::sin(angle));
    const double rx = cfg.half_width * (2.0 * unit(rng) - 1.0);
    const double ry = cfg.half_height * (2.0 * unit(rng) - 1.0);
    s.p_r = Value::vec(rx, ry);
    s.v_r = Value::vec(0.0, 0.0);
    s.action = "Goto";
    return s;
}

}  // namespace

std::vector<StartState> start_grid(const SimConfig& cfg, int nx, int ny, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<StartState> out;
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const double bx = -cfg.half_width + (ix + 0.5) * 2.0 * cfg.half_width / nx;
            const double by = -cfg.half_height + (iy + 0.5) * 2.0 * cfg.half_height / ny;
            out.push_back(draw(cfg, rng, bx, by));
        }
    }
    return out;
}

std::vector<StartState> random_starts(const SimConfig& cfg, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<StartState> out;
    for (int i = 0; i < n; ++i) {
        const double bx = cfg.half_width * (2.0 * unit(rng) - 1.0);
        const double by = cfg.half_height * (2.0 * unit(rng) - 1.0);
        out.push_back(draw(cfg, rng, bx, by));
    }
    return out;
}

std::vector<Demonstration> record_demos(const Policy& p, const SimConfig& cfg, const std::vector<StartState>& starts,
                                        int stride) {
    if (stride < 1) throw std::invalid_argument("stride must be positive");
    std::vector<Demonstration> out;
    for (const StartState& s : starts) {
        Episode ep = run_episode(p, cfg, s);
        // The last decision is kept whatever the stride; it is often the kick.
        for (std::size_t i = 0; i < ep.trace.size(); ++i) {
            if (i % static_cast<std::size_t>(stride) != 0 && i + 1 != ep.trace.size()) continue;
            const auto& [w, next] = ep.trace[i];
            out.push_back({w.start_action, w, next});
        }
    }
    return out;
}

ScoreResult score(const Policy& p, const SimConfig& cfg, const std::vector<StartState>& grid, Kernel kernel, int jobs) {
    ScoreResult r;
    r.episodes.resize(grid.size());
    if (kernel == Kernel::Parallel) {
        const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
        for (std::size_t i = 0; i < grid.size(); ++i) r.episodes[i] = run_episode(p, cfg, grid[i]);
    } else {
        for (std::size_t i = 0; i < grid.size(); ++i) r.episodes[i] = run_episode(p, cfg, grid[i]);
    }
    std::size_t wins = 0;
    for (const Episode& e : r.episodes)
        if (e.outcome == Outcome::Success) ++wins;
    r.rate = grid.empty() ? 0.0 : static_cast<double>(wins) / static_cast<double>(grid.size());
    return r;
}

std::string score_csv(const ScoreResult& r, const std::vector<StartState>& grid, int nx) {
    std::ostringstream os;
    os << "ix,iy,ball_x,ball_y,outcome,steps\n";
    for (std::size_t i = 0; i < r.episodes.size(); ++i) {
        os << (i % nx) << ',' << (i / nx) << ',' << format_number(grid[i].p_b.x) << ',' << format_number(grid[i].p_b.y)
           << ',' << to_string(r.episodes[i].outcome) << ',' << r.episodes[i].steps << '\n';
    }
    return os.str();
}

std::string episode_to_json(const Episode& e) {
    std::ostringstream os;
    auto vec = [&](const Value& v) { os << '[' << format_number(v.x) << ',' << format_number(v.y) << ']'; };
    os << "{\"outcome\":\"" << to_string(e.outcome) << "\",\"steps\":" << e.steps << ",\"trace\":[";
    for (std::size_t i = 0; i < e.trace.size(); ++i) {
        const auto& [w, a] = e.trace[i];
        if (i) os << ',';
        os << "{\"prev\":\"" << w.start_action << "\",\"next\":\"" << a << "\"";
        for (const char* k : {"p_r", "v_r", "p_b", "v_b"}) {
            os << ",\"" << k << "\":";
            vec(w.bindings.at(k));
        }
        os << '}';
    }
    os << "]}";
    return os.str();
}

std::optional<Demonstration> failed_kick_correction(const Policy& p, const Episode& e) {
    if (e.outcome != Outcome::Failure || e.strike_dist < 0.0 || e.trace.empty()) return std::nullopt;
    const WorldState& w = e.trace.back().first;
    std::string label = p.fallback;
    for (const Branch& b : p.branches) {
        if (b.action == "Kick") continue;
        if (eval_pred(b.guard, w)) {
            label = b.action;
            break;
        }
    }
    if (label == "Kick") return std::nullopt;
    return Demonstration{w.start_action, w, label};
}

RepairLoopResult repair_from_failures(const Policy& p, const SimConfig& cfg, const std::vector<StartState>& grid,
                                      int max_corrections, const SolveOptions& opts) {
    RepairLoopResult out;
    out.repair.policy = number_params(p);
    out.repair.sat = true;
    ScoreResult current = score(p, cfg, grid, opts.kernel, opts.jobs);
    out.before = current.rate;
    out.after = current.rate;

    // A failure the thresholds cannot fix (a bounce off the wall during the
    // wind-up, say) would drag the repair too far, so a correction is kept
    // only if the repaired policy scores better with it.
    std::vector<WorldState> rejected;
    int attempts = 0;
    const int budget = 10 * std::max(1, max_corrections);
    while (static_cast<int>(out.corrections.size()) < max_corrections && attempts < budget) {
        bool accepted = false;
        for (const Episode& e : current.episodes) {
            if (attempts >= budget) break;
            std::optional<Demonstration> c = failed_kick_correction(out.repair.policy, e);
            if (!c) continue;
            if (std::find(rejected.begin(), rejected.end(), c->world) != rejected.end()) continue;
            ++attempts;
            std::vector<Demonstration> trial = out.corrections;
            trial.push_back(*c);
            RepairResult r = repair(p, trial, opts);
            if (r.sat) {
                ScoreResult s = score(r.policy, cfg, grid, opts.kernel, opts.jobs);
                if (s.rate > current.rate) {
                    out.corrections = std::move(trial);
                    out.repair = std::move(r);
                    current = std::move(s);
                    accepted = true;
                    break;
                }
            }
            rejected.push_back(c->world);
        }
        if (!accepted) break;
    }
    out.after = current.rate;
    return out;
}

}  // namespace ldips
