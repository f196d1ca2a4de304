#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ldips/ast.hpp"
#include "ldips/interp.hpp"
#include "ldips/kernel.hpp"
#include "ldips/paramsolve.hpp"

namespace ldips {

// Point robot with capped acceleration and speed chasing a ball under linear
// drag on a bounded field. Units are canonical (length, time).
struct SimConfig {
    double dt = 0.02;
    int steps = 400;
    double robot_accel = 5.0;
    double robot_speed = 3.0;
    double friction = 0.5;          // ball drag rate, 1/time
    double planner_friction = 0.5;  // the robot's model of the drag, used for intercepts
    double kick_dist = 0.2;
    double kick_speed = 0.15;
    double kick_delay = 0.6;  // wind-up between the decision and the strike
    double goto_gain = 2.0;
    double inter_gain = 2.0;
    double half_width = 3.0;
    double half_height = 2.0;
    double ball_speed_max = 2.0;
    std::uint64_t seed = 1;
};

// Scales "friction" and "accel"; factors must be positive. The planner keeps
// its nominal friction.
SimConfig perturb(const SimConfig& cfg, const std::map<std::string, double>& factors);

struct StartState {
    Value p_r = Value::vec(0, 0);
    Value v_r = Value::vec(0, 0);
    Value p_b = Value::vec(0, 0);
    Value v_b = Value::vec(0, 0);
    std::string action = "Goto";
};

enum class Outcome { Success, Failure, Timeout };
std::string to_string(Outcome o);

struct Episode {
    StartState init;
    std::vector<std::pair<WorldState, std::string>> trace;  // world (with previous action) and choice
    Outcome outcome = Outcome::Timeout;
    int steps = 0;
    // Relative distance and speed when the strike landed; negative if no kick.
    double strike_dist = -1.0;
    double strike_speed = -1.0;
};

WorldState make_world(const StartState& s);

Episode run_episode(const Policy& p, const SimConfig& cfg, const StartState& init);

// Ball positions at the centres of an nx-by-ny grid over the field; ball
// velocity and robot position are drawn from `seed`.
std::vector<StartState> start_grid(const SimConfig& cfg, int nx = 20, int ny = 15, std::uint64_t seed = 1);
std::vector<StartState> random_starts(const SimConfig& cfg, int n, std::uint64_t seed);

// Every stride-th decision of each episode, plus its last one.
std::vector<Demonstration> record_demos(const Policy& p, const SimConfig& cfg, const std::vector<StartState>& starts,
                                        int stride = 1);

struct ScoreResult {
    double rate = 0.0;
    std::vector<Episode> episodes;  // same order as the grid
};

ScoreResult score(const Policy& p, const SimConfig& cfg, const std::vector<StartState>& grid,
                  Kernel kernel = Kernel::Parallel, int jobs = 0);

// ix,iy,ball_x,ball_y,outcome,steps for a grid made by start_grid(nx, ny).
std::string score_csv(const ScoreResult& r, const std::vector<StartState>& grid, int nx);

std::string episode_to_json(const Episode& e);

// For an episode that ended in a failed kick: the kick decision relabelled
// with what the policy would have chosen had no Kick branch fired.
std::optional<Demonstration> failed_kick_correction(const Policy& p, const Episode& e);

struct RepairLoopResult {
    RepairResult repair;
    std::vector<Demonstration> corrections;
    double before = 0.0;
    double after = 0.0;
};

// Counterexample loop: score under `cfg`, turn the first failed kick into a
// correction, repair the original policy against all corrections so far,
// and repeat until nothing fails or `max_corrections` is reached.
RepairLoopResult repair_from_failures(const Policy& p, const SimConfig& cfg, const std::vector<StartState>& grid,
                                      int max_corrections = 10, const SolveOptions& opts = {});

}  // namespace ldips
