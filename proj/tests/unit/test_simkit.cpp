#include <gtest/gtest.h>

#include <cmath>

#include "common.hpp"
#include "ldips/errors.hpp"
#include "ldips/simkit.hpp"

using namespace ldips;
using testing_support::data;
using testing_support::soccer;

namespace {

const Policy& reference() {
    static const Policy p = load_policy(data("reference.asp"), soccer());
    return p;
}

Policy always(const std::string& a) { return parse_policy("return " + a, soccer()); }

double speed(const Value& v) { return std::hypot(v.x, v.y); }

}  // namespace

TEST(Perturb, ScalesAndValidates) {
    SimConfig c;
    SimConfig same = perturb(c, {});
    EXPECT_EQ(same.friction, c.friction);
    EXPECT_EQ(same.robot_accel, c.robot_accel);
    SimConfig p = perturb(c, {{"friction", 1.5}, {"accel", 0.5}});
    EXPECT_DOUBLE_EQ(p.friction, c.friction * 1.5);
    EXPECT_DOUBLE_EQ(p.robot_accel, c.robot_accel * 0.5);
    EXPECT_EQ(p.planner_friction, c.planner_friction);
    EXPECT_THROW(perturb(c, {{"friction", -1}}), std::invalid_argument);
    EXPECT_THROW(perturb(c, {{"friction", 0}}), std::invalid_argument);
    EXPECT_THROW(perturb(c, {{"gravity", 2}}), std::invalid_argument);
}

TEST(Episode, StationaryBallAheadIsKicked) {
    StartState s;
    s.p_r = Value::vec(-0.1, 0);
    s.p_b = Value::vec(0, 0);
    Episode e = run_episode(reference(), SimConfig{}, s);
    EXPECT_EQ(e.outcome, Outcome::Success);
    ASSERT_FALSE(e.trace.empty());
    EXPECT_EQ(e.trace.back().second, "Kick");
    EXPECT_LE(e.strike_dist, SimConfig{}.kick_dist);
    EXPECT_LE(e.strike_speed, SimConfig{}.kick_speed);
}

TEST(Episode, NeverKickingTimesOut) {
    SimConfig c;
    Episode e = run_episode(always("Goto"), c, start_grid(c, 2, 2)[0]);
    EXPECT_EQ(e.outcome, Outcome::Timeout);
    EXPECT_EQ(e.steps, c.steps);
    EXPECT_LT(e.strike_dist, 0);
}

TEST(Episode, Deterministic) {
    SimConfig c;
    for (const StartState& s : start_grid(c, 4, 3)) {
        Episode a = run_episode(reference(), c, s);
        Episode b = run_episode(reference(), c, s);
        EXPECT_EQ(a.outcome, b.outcome);
        EXPECT_EQ(a.steps, b.steps);
        ASSERT_EQ(a.trace.size(), b.trace.size());
        for (std::size_t i = 0; i < a.trace.size(); ++i) EXPECT_EQ(a.trace[i], b.trace[i]);
    }
}

TEST(Episode, FrictionlessBallKeepsItsSpeed) {
    SimConfig c;
    c.friction = 0;
    StartState s;
    s.p_r = Value::vec(-2, -1);
    s.p_b = Value::vec(0.5, 0.5);
    s.v_b = Value::vec(1.3, -0.7);
    Episode e = run_episode(always("Goto"), c, s);
    for (const auto& [w, a] : e.trace) EXPECT_NEAR(speed(w.bindings.at("v_b")), speed(s.v_b), 1e-9);
}

TEST(Episode, BallStaysOnField) {
    SimConfig c;
    for (const StartState& s : random_starts(c, 10, 3)) {
        for (const auto& [w, a] : run_episode(always("Goto"), c, s).trace) {
            EXPECT_LE(std::fabs(w.bindings.at("p_b").x), c.half_width + 1e-9);
            EXPECT_LE(std::fabs(w.bindings.at("p_b").y), c.half_height + 1e-9);
        }
    }
}

TEST(Starts, GridAndRandomAreReproducible) {
    SimConfig c;
    auto g = start_grid(c, 5, 4, 9);
    ASSERT_EQ(g.size(), 20u);
    auto g2 = start_grid(c, 5, 4, 9);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g[i].v_b, g2[i].v_b);
    EXPECT_DOUBLE_EQ(g[0].p_b.x, -c.half_width + c.half_width / 5);
    auto r = random_starts(c, 7, 2);
    EXPECT_EQ(r.size(), 7u);
    EXPECT_EQ(random_starts(c, 7, 2)[6].p_b, r[6].p_b);
}

TEST(Record, DemosAgreeWithPolicy) {
    SimConfig c;
    auto starts = random_starts(c, 6, 4);
    auto demos = record_demos(reference(), c, starts);
    ASSERT_FALSE(demos.empty());
    for (const Demonstration& d : demos) {
        EXPECT_EQ(d.start_action, d.world.start_action);
        EXPECT_EQ(eval_policy(reference(), d.world), d.next_action);
    }
}

TEST(Record, StrideKeepsEveryNthAndLast) {
    SimConfig c;
    auto starts = random_starts(c, 3, 8);
    std::size_t expected = 0, all = 0;
    for (const StartState& s : starts) {
        std::size_t n = run_episode(reference(), c, s).trace.size();
        all += n;
        expected += (n + 4) / 5 + ((n - 1) % 5 != 0 ? 1 : 0);
    }
    EXPECT_EQ(record_demos(reference(), c, starts, 1).size(), all);
    EXPECT_EQ(record_demos(reference(), c, starts, 5).size(), expected);
    EXPECT_TRUE(record_demos(reference(), c, {}, 1).empty());
}

TEST(Score, NeverKickingScoresZero) {
    SimConfig c;
    auto grid = start_grid(c, 4, 3);
    EXPECT_EQ(score(always("Goto"), c, grid, Kernel::Serial).rate, 0.0);
}

TEST(Score, ReferenceIsGoodAndFrictionHurts) {
    SimConfig c;
    auto grid = start_grid(c, 20, 15, 1);
    double nominal = score(reference(), c, grid).rate;
    double rough = score(reference(), perturb(c, {{"friction", 1.5}}), grid).rate;
    EXPECT_GT(nominal, 0.9);
    EXPECT_GE(nominal - rough, 0.10);
}

TEST(Score, SerialAndParallelAgree) {
    SimConfig c;
    auto grid = start_grid(c, 8, 6, 2);
    auto a = score(reference(), c, grid, Kernel::Serial);
    auto b = score(reference(), c, grid, Kernel::Parallel);
    EXPECT_EQ(a.rate, b.rate);
    ASSERT_EQ(a.episodes.size(), b.episodes.size());
    for (std::size_t i = 0; i < a.episodes.size(); ++i) {
        EXPECT_EQ(a.episodes[i].outcome, b.episodes[i].outcome);
        EXPECT_EQ(a.episodes[i].steps, b.episodes[i].steps);
    }
}

TEST(Score, CsvHasOneRowPerStart) {
    SimConfig c;
    auto grid = start_grid(c, 3, 2);
    std::string csv = score_csv(score(reference(), c, grid, Kernel::Serial), grid, 3);
    EXPECT_EQ(csv.rfind("ix,iy,ball_x,ball_y,outcome,steps\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
}

TEST(Corrections, FailedKickIsRelabelled) {
    SimConfig c = perturb(SimConfig{}, {{"friction", 1.5}});
    auto r = score(reference(), c, start_grid(c, 20, 15, 1));
    int checked = 0;
    for (const Episode& e : r.episodes) {
        auto fix = failed_kick_correction(reference(), e);
        if (e.outcome != Outcome::Failure || e.strike_dist < 0) {
            EXPECT_FALSE(fix);
            continue;
        }
        ASSERT_TRUE(fix);
        EXPECT_NE(fix->next_action, "Kick");
        EXPECT_EQ(eval_policy(reference(), fix->world), "Kick");
        ++checked;
    }
    EXPECT_GT(checked, 0);
}

TEST(Corrections, RepairLoopRecoversScore) {
    SimConfig c = perturb(SimConfig{}, {{"friction", 1.5}});
    auto grid = start_grid(c, 20, 15, 1);
    auto r = repair_from_failures(reference(), c, grid, 10);
    ASSERT_TRUE(r.repair.sat) << r.repair.reason;
    EXPECT_LE(r.corrections.size(), 10u);
    EXPECT_GT(r.after, r.before);
    for (const Demonstration& d : r.corrections) EXPECT_EQ(eval_policy(r.repair.policy, d.world), d.next_action);
}
