#include <benchmark/benchmark.h>

#include <random>

#include "ldips/enumerate.hpp"
#include "ldips/paramsolve.hpp"
#include "ldips/parser.hpp"
#include "ldips/simkit.hpp"
#include "ldips/worldio.hpp"

using namespace ldips;

namespace {

std::string data(const std::string& name) { return std::string(LDIPS_DATA_DIR) + "/" + name; }

const DomainDef& soccer() {
    static const DomainDef d = load_domain(data("soccer.domain.json"));
    return d;
}

std::vector<WorldState> example_worlds(std::size_t n) {
    std::vector<WorldState> out;
    for (const Demonstration& d : load_demos(data("reference.demos.jsonl"), soccer())) {
        if (out.size() == n) break;
        out.push_back(d.world);
    }
    return out;
}

Kernel kernel_of(const benchmark::State& s) { return s.range(0) ? Kernel::Parallel : Kernel::Serial; }

void BM_Enumerate(benchmark::State& state) {
    const TypeEnv env = make_env(soccer());
    const auto worlds = example_worlds(200);
    EnumConfig cfg;
    cfg.max_depth = 3;
    cfg.kernel = kernel_of(state);
    for (auto _ : state) benchmark::DoNotOptimize(enum_features(cfg, env, TargetPattern::scalar_any(), worlds));
}
BENCHMARK(BM_Enumerate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Solve(benchmark::State& state) {
    TypeEnv env;
    env.inputs = {{"x", ValueType::scalar()}, {"y", ValueType::scalar()}, {"z", ValueType::scalar()}};
    env.ops = builtin_registry();
    env.actions = {"A"};
    Pred b = parse_pred("x < ?a && y > ?b || z < ?c", env);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-10, 10);
    std::vector<WorldState> pos, neg;
    for (int i = 0; i < 60; ++i) {
        WorldState w;
        w.start_action = "A";
        double x = u(rng), y = u(rng), z = u(rng);
        w.bindings = {{"x", Value::scalar(x)}, {"y", Value::scalar(y)}, {"z", Value::scalar(z)}};
        ((x < 2 && y > -1) || z < -4 ? pos : neg).push_back(w);
    }
    ParamConstraintSystem sys = build_system(b, pos, neg);
    SolveOptions o;
    o.kernel = kernel_of(state);
    for (auto _ : state) benchmark::DoNotOptimize(solve(sys, o));
}
BENCHMARK(BM_Solve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Score(benchmark::State& state) {
    const Policy p = load_policy(data("reference.asp"), soccer());
    SimConfig c;
    auto grid = start_grid(c, 20, 15, 1);
    for (auto _ : state) benchmark::DoNotOptimize(score(p, c, grid, kernel_of(state)));
}
BENCHMARK(BM_Score)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
