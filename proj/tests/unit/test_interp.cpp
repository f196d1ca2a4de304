#include <gtest/gtest.h>

#include <cmath>

#include "common.hpp"
#include "ldips/errors.hpp"
#include "ldips/printer.hpp"
#include "policy_gen.hpp"

using namespace ldips;
using testing_support::data;
using testing_support::soccer;
using testing_support::soccer_env;
using testing_support::world;

namespace {

const Value kZero = Value::vec(0, 0);

// Walks the branches by hand with the three named features supplied directly.
std::string user_policy_oracle(const std::string& start, double dpos, double dvel, double vb) {
    if (start == "Kick" || (dpos < 150 && dvel < 100)) return "Kick";
    if (vb > 100) return "Inter";
    return "Goto";
}

// A world with |p_r - p_b| = dpos, |v_r - v_b| = dvel and |v_b| = vb.
WorldState user_policy_world(const std::string& start, double dpos, double dvel, double vb) {
    return world(start, Value::vec(dpos, 0), Value::vec(0, vb + dvel), kZero, Value::vec(0, vb));
}

}  // namespace

TEST(EvalExpr, Examples) {
    WorldState w = world("Goto", kZero, kZero, Value::vec(3, 4), Value::vec(0, -0.201));
    EXPECT_DOUBLE_EQ(eval_expr(parse_expr("norm(p_r - p_b)", soccer_env()), w).x, 5.0);
    EXPECT_DOUBLE_EQ(eval_expr(parse_expr("abs(-2.5)", soccer_env()), w).x, 2.5);
    EXPECT_DOUBLE_EQ(eval_expr(parse_expr("norm(v_b)", soccer_env()), w).x, 0.201);
    EXPECT_DOUBLE_EQ(eval_expr(parse_expr("dist(p_r, p_b)", soccer_env()), w).x, 5.0);
}

TEST(EvalExpr, DivisionByZeroIsAnError) {
    WorldState w = world("Goto", kZero, kZero, kZero, kZero);
    try {
        eval_expr(parse_expr("norm(p_b) / norm(p_r)", soccer_env()), w);
        FAIL();
    } catch (const EvalError& e) {
        EXPECT_EQ(e.kind(), EvalError::Kind::DivisionByZero);
    }
}

TEST(EvalExpr, UnboundInputAndUnfilledHole) {
    WorldState w;
    w.start_action = "Goto";
    EXPECT_THROW(eval_expr(parse_expr("norm(p_b)", soccer_env()), w), EvalError);
    EXPECT_THROW(eval_expr(Expr::hole("e", ValueType::scalar()), w), EvalError);
}

TEST(EvalPolicy, UserPolicy) {
    Policy p = load_policy(data("user.completed.asp"), soccer());
    EXPECT_EQ(eval_policy(p, user_policy_world("Kick", 1e6, 1e6, 0)), "Kick");
    EXPECT_EQ(eval_policy(p, user_policy_world("Goto", 200, 150, 50)), "Goto");
    EXPECT_EQ(eval_policy(p, user_policy_world("Goto", 10, 10, 0)), "Kick");
}

TEST(EvalPolicy, UserPolicyAgainstBranchWalker) {
    Policy p = load_policy(data("user.completed.asp"), soccer());
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 300.0);
    for (int i = 0; i < 500; ++i) {
        const std::string start = soccer().actions[i % 3];
        const double a = u(rng), b = u(rng), c = u(rng);
        WorldState w = user_policy_world(start, a, b, c);
        // Features recomputed from the bindings, not from the construction.
        const double dpos = std::hypot(w.bindings["p_r"].x - w.bindings["p_b"].x, w.bindings["p_r"].y - w.bindings["p_b"].y);
        const double dvel = std::hypot(w.bindings["v_r"].x - w.bindings["v_b"].x, w.bindings["v_r"].y - w.bindings["v_b"].y);
        const double vb = std::hypot(w.bindings["v_b"].x, w.bindings["v_b"].y);
        ASSERT_EQ(eval_policy(p, w), user_policy_oracle(start, dpos, dvel, vb));
    }
}

TEST(EvalPolicy, BranchOrderMatters) {
    Policy p = parse_policy("if (norm(v_b) > 1): Inter elif (norm(v_b) > 0.5): Kick else: Goto", soccer());
    Policy swapped = p;
    std::swap(swapped.branches[0], swapped.branches[1]);
    WorldState w = world("Goto", kZero, kZero, kZero, Value::vec(2, 0));
    EXPECT_EQ(eval_policy(p, w), "Inter");
    EXPECT_EQ(eval_policy(swapped, w), "Kick");
}

TEST(PartialEval, Examples) {
    WorldState w345 = world("Goto", kZero, kZero, Value::vec(3, 4), kZero);
    ResidualPred r = partial_eval(parse_pred("norm(p_r - p_b) < ?k:[1,0,0]", soccer_env()), w345);
    ASSERT_EQ(r.kind, ResidualPred::Kind::Atom);
    EXPECT_DOUBLE_EQ(r.constant, 5.0);
    EXPECT_EQ(r.param, "k");
    EXPECT_TRUE(r.holds({{"k", 6.0}}));
    EXPECT_FALSE(r.holds({{"k", 4.0}}));

    WorldState kick = world("Kick", kZero, kZero, kZero, kZero);
    EXPECT_TRUE(partial_eval(parse_pred("a_s==Kick || norm(v_b) < ?k:[1,-1,0]", soccer_env()), kick).is_true());

    WorldState go = world("Goto", kZero, kZero, kZero, Value::vec(0, 0.5));
    ResidualPred g = partial_eval(parse_pred("a_s==Goto && norm(v_b) > ?k:[1,-1,0]", soccer_env()), go);
    ASSERT_EQ(g.kind, ResidualPred::Kind::Atom);
    EXPECT_DOUBLE_EQ(g.constant, eval_expr(parse_expr("norm(v_b)", soccer_env()), go).x);
    EXPECT_TRUE(g.holds({{"k", 0.4}}));
    EXPECT_FALSE(g.holds({{"k", 0.6}}));
}

TEST(PartialEval, ConcreteComparisonsFold) {
    WorldState w = world("Goto", kZero, kZero, Value::vec(3, 4), kZero);
    EXPECT_TRUE(partial_eval(parse_pred("norm(p_b) > 4.5", soccer_env()), w).is_true());
    EXPECT_TRUE(partial_eval(parse_pred("norm(p_b) > 5", soccer_env()), w).is_false());
}

TEST(PartialEval, EquivalentToEvalOnHoleFreePredicates) {
    testing_support::PolicyGen::Options o;
    o.holes = false;
    testing_support::PolicyGen gen(soccer_env(), 11, o);
    std::mt19937_64 rng(12);
    int checked = 0;
    for (int i = 0; i < 1000; ++i) {
        Pred b = gen.pred(3);
        WorldState w = testing_support::random_world(rng, soccer().actions[i % 3]);
        bool value;
        try {
            value = eval_pred(b, w);
        } catch (const EvalError&) {
            EXPECT_THROW(partial_eval(b, w), EvalError);
            continue;
        }
        ResidualPred r = partial_eval(b, w);
        ASSERT_TRUE(r.is_true() || r.is_false()) << print_pred(b);
        ASSERT_EQ(r.is_true(), value) << print_pred(b);
        ++checked;
    }
    EXPECT_GT(checked, 900);
}

TEST(PartialEval, ResidualAgreesWithEvalAfterFilling) {
    // Blank thresholds: the residual evaluated at k must match eval of the
    // predicate with k substituted.
    Pred b = parse_pred("norm(v_b) > ?a:[1,-1,0] && (norm(p_r - p_b) < ?b:[1,0,0] || a_s==Inter)", soccer_env());
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int i = 0; i < 300; ++i) {
        WorldState w = testing_support::random_world(rng, soccer().actions[i % 3]);
        ResidualPred r = partial_eval(b, w);
        const double a = u(rng), c = u(rng);
        Pred filled = fill_params(b, {{"a", a}, {"b", c}});
        ASSERT_EQ(r.holds({{"a", a}, {"b", c}}), eval_pred(filled, w));
    }
}
