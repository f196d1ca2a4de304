// Acceptance checks. Usage: acceptance N (1..8). Prints one PASS/FAIL line
// and exits nonzero on failure.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ldips/enumerate.hpp"
#include "ldips/parser.hpp"
#include "ldips/printer.hpp"
#include "ldips/simkit.hpp"
#include "ldips/synth.hpp"
#include "ldips/typecheck.hpp"
#include "ldips/worldio.hpp"
#include "naive_enum.hpp"
#include "policy_gen.hpp"
#include "random_system.hpp"

using namespace ldips;
namespace fs = std::filesystem;

namespace {

std::string data(const std::string& name) { return std::string(LDIPS_DATA_DIR) + "/" + name; }

const DomainDef& soccer() {
    static const DomainDef d = load_domain(data("soccer.domain.json"));
    return d;
}

fs::path scratch() {
    static const fs::path dir = [] {
        fs::path p = fs::temp_directory_path() / ("ldips_acceptance_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

struct Run {
    int code = -1;
    std::string out;
    double seconds = 0.0;
};

// Runs the CLI with stderr (the run report) discarded.
Run cli(const std::string& args) {
    const std::string cmd = std::string("\"") + LDIPS_CLI + "\" " + args + " 2>/dev/null";
    Run r;
    auto t0 = std::chrono::steady_clock::now();
    FILE* f = ::popen(cmd.c_str(), "r");
    if (!f) return r;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) r.out.append(buf, n);
    int status = ::pclose(f);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }
std::string q(const std::string& p) { return "\"" + p + "\""; }

struct Verdict {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << " [failed: " << what << "]";
        }
    }
};

const SimConfig kSim{};

// The fixture is regenerated here so the check also covers its provenance.
std::vector<StartState> fixture_starts() { return random_starts(kSim, 20, 31); }
constexpr int kFixtureStride = 3;

const Policy& reference() {
    static const Policy p = load_policy(data("reference.asp"), soccer());
    return p;
}

Verdict criterion1() {
    Verdict v;
    const std::string demos_path = data("reference.demos.jsonl");
    auto demos = load_demos(demos_path, soccer());
    v.require(demos == record_demos(reference(), kSim, fixture_starts(), kFixtureStride),
              "fixture matches a fresh recording");
    v.require(fixture_starts().size() >= 8, ">= 8 start states");
    v.require(demos.size() >= 200, ">= 200 records");

    const fs::path out = scratch() / "c1.asp";
    Run r = cli("--serial --jobs 1 synth --domain " + q(data("soccer.domain.json")) + " --demos " + q(demos_path) +
                " --out " + q(out));
    v.require(r.code == 0, "synth exit code 0");
    std::size_t agree = 0;
    if (r.code == 0) {
        Policy p = load_policy(out.string(), soccer());
        for (const Demonstration& d : demos) agree += eval_policy(p, d.world) == d.next_action;
    }
    v.require(agree == demos.size(), "100% consistency");
    v.require(r.seconds < 60.0, "under 60 s");
    v.detail << " starts=" << fixture_starts().size() << " records=" << demos.size() << " consistent=" << agree << "/"
             << demos.size() << " seconds=" << r.seconds;
    return v;
}

// Held-out worlds: every state visited by the reference from 40 fresh
// starts, sampled evenly down to 1000.
std::vector<WorldState> held_out() {
    std::vector<WorldState> all;
    for (const StartState& s : random_starts(kSim, 40, 99))
        for (const auto& [w, a] : run_episode(reference(), kSim, s).trace) all.push_back(w);
    std::vector<WorldState> out;
    for (std::size_t i = 0; i < 1000 && !all.empty(); ++i) out.push_back(all[i * all.size() / 1000]);
    return out;
}

Verdict criterion2() {
    Verdict v;
    auto demos = load_demos(data("reference.demos.jsonl"), soccer());
    SynthConfig cfg;
    cfg.kernel = Kernel::Serial;
    SynthResult r = l3(cfg, demos, soccer());
    v.require(r.sat, "synthesis succeeds");
    auto worlds = held_out();
    v.require(worlds.size() == 1000, "1000 held-out states");
    std::size_t agree = 0;
    if (r.sat)
        for (const WorldState& w : worlds) agree += eval_policy(r.policy, w) == eval_policy(reference(), w);
    v.require(agree * 100 >= worlds.size() * 95, ">= 95% agreement");
    v.detail << " agreement=" << agree << "/" << worlds.size();
    return v;
}

Verdict criterion3() {
    Verdict v;
    Run r = cli("enum-stats --domain " + q(data("soccer.domain.json")) + " --demos " + q(data("worked.demos.jsonl")));
    v.require(r.code == 0, "enum-stats exit code 0");
    std::map<std::string, double> at3;
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    v.require(line == "mode,depth,count", "CSV header");
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string mode, depth, count;
        std::getline(row, mode, ',');
        std::getline(row, depth, ',');
        std::getline(row, count, ',');
        if (depth == "3") at3[mode] = std::stod(count);
    }
    const double full = at3["full"], dim = at3["dimension-only"], sig = at3["signature-only"], none = at3["none"];
    v.require(full < dim && dim < none, "full < dimension-only < none");
    v.require(full < sig && sig < none, "full < signature-only < none");
    v.require(full > 0 && none / full >= 5.0, "none/full >= 5");
    v.require(r.seconds < 30.0, "under 30 s");
    v.detail << " full=" << full << " dimension-only=" << dim << " signature-only=" << sig << " none=" << none
             << " ratio=" << (full > 0 ? none / full : 0) << " seconds=" << r.seconds;
    return v;
}

TypeEnv random_env(std::mt19937_64& rng) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto dim = [&] { return Dimension(pick(-1, 1), pick(-1, 1), pick(0, 1)); };
    TypeEnv env;
    const int ninputs = pick(1, 3);
    for (int i = 0; i < ninputs; ++i) {
        ValueType t = pick(0, 1) ? ValueType::vector(dim()) : ValueType::scalar(dim());
        env.inputs.push_back({"x" + std::to_string(i), t});
    }
    std::vector<std::string> all{"abs", "sin", "cos", "norm", "+", "-", "*", "/", "dist"}, chosen;
    for (const auto& op : all)
        if (pick(0, 2)) chosen.push_back(op);
    env.ops = builtin_registry().subset(chosen);
    if (pick(0, 1)) env.constants.push_back({static_cast<double>(pick(-2, 3)), dim()});
    env.actions = {"A"};
    return env;
}

std::vector<WorldState> random_examples(std::mt19937_64& rng, const TypeEnv& env) {
    std::uniform_int_distribution<int> n(1, 4), small(-3, 3);
    std::uniform_real_distribution<double> u(-2, 2);
    std::vector<WorldState> out(static_cast<std::size_t>(n(rng)));
    for (WorldState& w : out) {
        w.start_action = "A";
        for (const InputDecl& in : env.inputs) {
            // Small integers make zeros and coincidences (and so faults and
            // merges) common.
            auto val = [&] { return std::bernoulli_distribution(0.5)(rng) ? static_cast<double>(small(rng)) : u(rng); };
            w.bindings[in.name] = in.type.is_vector() ? Value::vec(val(), val()) : Value::scalar(val());
        }
    }
    return out;
}

Verdict criterion4() {
    Verdict v;
    std::mt19937_64 rng(2024);
    std::size_t checked = 0, missing = 0;
    for (int trial = 0; trial < 100; ++trial) {
        TypeEnv env = random_env(rng);
        auto examples = random_examples(rng, env);
        EnumConfig cfg;
        cfg.max_depth = env.inputs.size() + env.constants.size() > 2 ? 2 : 3;
        cfg.kernel = Kernel::Serial;
        cfg.mode = PruningMode::Full;
        auto full = enum_features(cfg, env, TargetPattern::scalar_any(), examples);
        cfg.mode = PruningMode::None;
        auto none = enum_features(cfg, env, TargetPattern::scalar_any(), examples);
        std::vector<testing_support::NaiveSig> reps;
        for (const Candidate& c : full) reps.push_back(testing_support::naive_signature(c.expr, examples));
        for (const Candidate& c : none) {
            try {
                check_expr(c.expr, env);
            } catch (const TypeError&) {
                continue;
            }
            ++checked;
            auto s = testing_support::naive_signature(c.expr, examples);
            bool found = false;
            for (const auto& r : reps)
                if (testing_support::naive_equal(r, s, 1e-9)) {
                    found = true;
                    break;
                }
            if (!found) {
                ++missing;
                if (missing <= 3) v.detail << " missing=" << print_expr(c.expr, env.ops);
            }
        }
    }
    v.require(missing == 0, "every type-correct expression represented");
    v.require(checked > 0, "nonempty");
    v.detail << " envs=100 type-correct=" << checked << " unrepresented=" << missing;
    return v;
}

Verdict criterion5() {
    Verdict v;
    std::mt19937_64 rng(5);
    std::size_t sat = 0, disagree = 0, unverified = 0;
    for (int i = 0; i < 500; ++i) {
        auto s = testing_support::random_system(rng, 3, 12);
        SolveOptions o;
        o.kernel = Kernel::Serial;
        SolveResult r = solve(build_system(s.pred, s.pos, s.neg), o);
        auto oracle = testing_support::grid_oracle(s);
        disagree += r.sat != oracle.has_value();
        if (r.sat) {
            ++sat;
            unverified += !testing_support::consistent(s, r.assignment);
        }
    }
    v.require(disagree == 0, "SAT/UNSAT agrees with the grid oracle");
    v.require(unverified == 0, "every assignment verifies");
    v.detail << " systems=500 sat=" << sat << " disagreements=" << disagree << " unverified=" << unverified;
    return v;
}

double rate_of(const Run& r) { return r.code == 0 ? std::stod(r.out) : -1.0; }

Verdict criterion6() {
    Verdict v;
    const std::string dom = " --domain " + q(data("soccer.domain.json"));
    const std::string ref = " --policy " + q(data("reference.asp"));
    const std::string grid = " --grid 20x15 --seed 1";
    const std::string rough = " --perturb friction=1.5";
    const double nominal = rate_of(cli("simulate" + dom + ref + grid));
    const double perturbed = rate_of(cli("simulate" + dom + ref + grid + rough));

    const fs::path corr = scratch() / "c6.corrections.jsonl", fixed = scratch() / "c6.repaired.asp";
    const fs::path adj = scratch() / "c6.adjustments.csv";
    Run c = cli("corrections" + dom + ref + grid + rough + " --max 10 --out " + q(corr));
    v.require(c.code == 0, "corrections exit code 0");
    std::size_t ncorr = c.code == 0 ? load_demos(corr.string(), soccer()).size() : 0;
    Run r = cli("repair" + dom + ref + " --corrections " + q(corr) + " --out " + q(fixed) + " --adjustments " +
                q(adj));
    v.require(r.code == 0, "repair exit code 0");
    const double repaired = r.code == 0 ? rate_of(cli("simulate" + dom + " --policy " + q(fixed) + grid + rough)) : -1;
    Run chk = cli("check" + dom + " --policy " + q(fixed) + " --demos " + q(corr));

    const double loss = nominal - perturbed;
    const double recovered = loss > 0 ? (repaired - perturbed) / loss : 0;
    v.require(loss >= 0.10, "friction drops the score by >= 10 points");
    v.require(ncorr >= 1 && ncorr <= 10, "1..10 corrections");
    v.require(recovered >= 0.80, "repair restores >= 80% of the loss");
    v.require(chk.code == 0, "all corrections classified correctly");
    v.detail << " nominal=" << nominal << " perturbed=" << perturbed << " repaired=" << repaired
             << " corrections=" << ncorr << " recovered=" << recovered;
    return v;
}

Verdict criterion7() {
    Verdict v;
    const TypeEnv env = make_env(soccer());
    testing_support::PolicyGen gen(env, 77);
    std::size_t same = 0;
    for (int i = 0; i < 1000; ++i) {
        Policy p = gen.policy();
        const std::string text = print_policy(p);
        bool ok = false;
        try {
            Policy back = parse_policy(text, env);
            ok = back == p && print_policy(back) == text;
        } catch (const Error&) {
        }
        if (ok) ++same;
        else if (i - static_cast<int>(same) < 3) v.detail << " mismatch=" << text;
    }
    v.require(same == 1000, "parse(print(p)) == p");

    std::string first;
    bool identical = true;
    for (int i = 0; i < 3; ++i) {
        const fs::path out = scratch() / ("c7." + std::to_string(i) + ".asp");
        Run r = cli("synth --domain " + q(data("soccer.domain.json")) + " --demos " + q(data("reference.demos.jsonl")) +
                    " --out " + q(out));
        std::string text = r.code == 0 ? read_file(out.string()) : "";
        identical = identical && r.code == 0 && !text.empty() && (i == 0 || text == first);
        if (i == 0) first = text;
    }
    v.require(identical, "repeated synth runs are byte-identical");
    v.detail << " round-trips=" << same << "/1000 synth-identical=" << (identical ? "yes" : "no");
    return v;
}

Verdict criterion8() {
    Verdict v;
    const std::string fixture = data("contradiction.demos.jsonl");
    auto demos = load_demos(fixture, soccer());
    // The fixture is the consistent set with exactly one label flipped.
    auto base = load_demos(data("worked.demos.jsonl"), soccer());
    std::size_t diffs = 0;
    bool same_worlds = demos.size() == base.size();
    for (std::size_t i = 0; same_worlds && i < demos.size(); ++i) {
        same_worlds = demos[i].world == base[i].world && demos[i].start_action == base[i].start_action;
        diffs += demos[i].next_action != base[i].next_action;
    }
    v.require(same_worlds && diffs == 1, "fixture differs from a consistent set by one label");

    const fs::path out = scratch() / "c8.asp";
    Run r = cli("synth --domain " + q(data("soccer.domain.json")) + " --demos " + q(fixture) + " --out " + q(out));
    v.require(r.code == 2, "exit code 2");
    v.require(!fs::exists(out) && r.out.empty(), "no policy written");

    // Same with the out flag omitted, and on a flipped copy of the large fixture.
    Run r2 = cli("synth --domain " + q(data("soccer.domain.json")) + " --demos " + q(fixture));
    v.require(r2.code == 2 && r2.out.empty(), "exit code 2 and empty stdout");
    auto big = load_demos(data("reference.demos.jsonl"), soccer());
    Demonstration flip = big[big.size() / 2];
    flip.next_action = flip.next_action == "Goto" ? "Kick" : "Goto";
    big.push_back(flip);
    const fs::path flipped = scratch() / "c8.flipped.jsonl";
    save_demos(big, soccer(), flipped.string());
    Run r3 = cli("synth --domain " + q(data("soccer.domain.json")) + " --demos " + q(flipped));
    v.require(r3.code == 2 && r3.out.empty(), "flipped reference demos give exit code 2");
    v.detail << " exit=" << r.code << "," << r2.code << "," << r3.code;
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 0;
    static const char* names[] = {"",
                                  "end-to-end consistency",
                                  "behavioral recovery",
                                  "pruning ablation ordering",
                                  "pruning soundness",
                                  "solver completeness",
                                  "repair at desk scale",
                                  "round-trip and determinism",
                                  "UNSAT behavior"};
    Verdict (*checks[])() = {nullptr,     criterion1, criterion2, criterion3, criterion4,
                             criterion5, criterion6, criterion7, criterion8};
    if (n < 1 || n > 8) {
        std::cerr << "usage: acceptance N   (N in 1..8)\n";
        return 64;
    }
    Verdict v;
    try {
        v = checks[n]();
    } catch (const std::exception& e) {
        v.ok = false;
        v.detail << " [exception: " << e.what() << "]";
    }
    std::cout << (v.ok ? "PASS" : "FAIL") << " criterion " << n << " (" << names[n] << "):" << v.detail.str()
              << std::endl;
    fs::remove_all(scratch());
    return v.ok ? 0 : 1;
}
