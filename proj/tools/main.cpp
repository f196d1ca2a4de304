#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>
#include <openssl/sha.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "ldips/enumerate.hpp"
#include "ldips/errors.hpp"
#include "ldips/interp.hpp"
#include "ldips/paramsolve.hpp"
#include "ldips/printer.hpp"
#include "ldips/simkit.hpp"
#include "ldips/synth.hpp"
#include "ldips/version.hpp"
#include "ldips/worldio.hpp"

using namespace ldips;
using Json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kUnsat = 2, kCapacity = 3, kInvalid = 4 };

// Raised for a well-formed run whose answer is "no": UNSAT or a failed check.
struct Verdict {
    int code;
    std::string message;
};

struct Globals {
    int jobs = 0;
    double tolerance = 1e-9;
    int max_depth = 3;
    int max_atoms = -1;  // follows max_depth when not given
    bool serial = false;
    std::string report;
};

struct Report {
    Json j = Json::object();
    Report() {
        j["subcommand"] = "";
        j["inputs"] = Json::object();
        j["timing"] = {{"enumeration", 0.0}, {"solving", 0.0}, {"assembly", 0.0}, {"total", 0.0}};
        j["counts"] = Json::object();
        j["outcome"] = "";
        j["exit_code"] = 0;
    }
    void input(const std::string& path) {
        const std::string bytes = read_file(path);
        unsigned char md[SHA256_DIGEST_LENGTH];
        SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), md);
        std::string hex = "sha256:";
        char buf[3];
        for (unsigned char c : md) {
            std::snprintf(buf, sizeof buf, "%02x", c);
            hex += buf;
        }
        j["inputs"][path] = hex;
    }
    void stats(const SynthStats& s) {
        j["timing"]["enumeration"] = s.enumeration_seconds;
        j["timing"]["solving"] = s.solving_seconds;
        j["timing"]["assembly"] = s.assembly_seconds;
        j["counts"]["features"] = s.features;
        j["counts"]["skeletons"] = s.skeletons;
        j["counts"]["fills"] = s.fills;
        j["counts"]["solver_calls"] = s.solver_calls;
    }
};

SynthConfig synth_config(const Globals& g) {
    SynthConfig c;
    c.max_depth = g.max_depth;
    c.max_atoms = g.max_atoms > 0 ? g.max_atoms : g.max_depth;
    c.tolerance = g.tolerance;
    c.kernel = g.serial ? Kernel::Serial : Kernel::Parallel;
    c.jobs = g.jobs;
    return c;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-")
        std::cout << text;
    else
        write_file(path, text);
}

std::map<std::string, double> parse_factors(const std::vector<std::string>& items) {
    std::map<std::string, double> out;
    for (const std::string& kv : items) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("--perturb", "expected key=value, got '" + kv + "'");
        try {
            out[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        } catch (const std::exception&) {
            throw CLI::ValidationError("--perturb", "not a number in '" + kv + "'");
        }
    }
    return out;
}

std::pair<int, int> parse_grid(const std::string& g) {
    int nx = 0, ny = 0;
    char x = 0;
    std::istringstream is(g);
    if (!(is >> nx >> x >> ny) || x != 'x' || nx < 1 || ny < 1)
        throw CLI::ValidationError("--grid", "expected NXxNY such as 20x15, got '" + g + "'");
    return {nx, ny};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dimension-informed synthesis of action selection policies"};
    app.set_version_flag("--version", std::string("ldips ") + kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    g.jobs = omp_get_max_threads();
    app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--tolerance", g.tolerance, "Signature equality tolerance")->check(CLI::PositiveNumber);
    app.add_option("--max-depth", g.max_depth, "Feature depth")->check(CLI::Range(1, 8));
    app.add_option("--max-atoms", g.max_atoms, "Comparisons per predicate (default: --max-depth)")
        ->check(CLI::Range(1, 8));
    app.add_flag("--serial", g.serial, "Use the serial reference kernels");
    app.add_option("--report", g.report, "Write the run report here instead of stderr");

    Report report;
    std::function<void()> action;

    std::string domain_path, demos_path, policy_path, sketch_path, out_path, csv_path, corrections_path, world_json,
        start_action, grid = "20x15";
    std::vector<std::string> factors;
    std::uint64_t seed = 1;
    int starts = 8, stride = 1, max_corrections = 10;
    std::string modes = "full,dimension-only,signature-only,none";

    auto domain = [&]() {
        report.input(domain_path);
        return load_domain(domain_path);
    };
    auto demos_of = [&](const std::string& path, const DomainDef& d) {
        report.input(path);
        return load_demos(path, d);
    };
    auto policy_of = [&](const std::string& path, const DomainDef& d) {
        report.input(path);
        return load_policy(path, d);
    };
    auto sim_config = [&]() {
        SimConfig c;
        c.seed = seed;
        return perturb(c, parse_factors(factors));
    };

    // synth
    auto* synth = app.add_subcommand("synth", "Synthesize a policy from demonstrations");
    synth->add_option("--domain", domain_path)->required();
    synth->add_option("--demos", demos_path)->required();
    synth->add_option("--sketch", sketch_path, "Policy with holes to complete");
    synth->add_option("--out", out_path, "Policy file (stdout if omitted)");
    synth->callback([&] {
        action = [&] {
            DomainDef d = domain();
            std::vector<Demonstration> demos = demos_of(demos_path, d);
            std::optional<Policy> sketch;
            if (!sketch_path.empty()) sketch = policy_of(sketch_path, d);
            SynthResult r = l3(synth_config(g), demos, d, sketch);
            report.stats(r.stats);
            report.j["counts"]["demos"] = demos.size();
            if (!r.sat) throw Verdict{kUnsat, "UNSAT: " + r.reason};
            emit(out_path, print_policy(r.policy));
        };
    });

    // check
    auto* check = app.add_subcommand("check", "Type-check a policy and its consistency with demonstrations");
    check->add_option("--domain", domain_path)->required();
    check->add_option("--policy", policy_path)->required();
    check->add_option("--demos", demos_path);
    check->callback([&] {
        action = [&] {
            DomainDef d = domain();
            Policy p = policy_of(policy_path, d);
            if (demos_path.empty()) {
                std::cout << "ok: policy type-checks\n";
                return;
            }
            std::vector<Demonstration> demos = demos_of(demos_path, d);
            for (std::size_t i = 0; i < demos.size(); ++i) {
                const std::string got = eval_policy(p, demos[i].world);
                if (got != demos[i].next_action) {
                    throw Verdict{kInvalid, "demo " + std::to_string(i + 1) + " expects " + demos[i].next_action +
                                                " but the policy chooses " + got + ": " +
                                                demo_to_json(demos[i], d)};
                }
            }
            report.j["counts"]["demos"] = demos.size();
            std::cout << "ok: " << demos.size() << " demonstrations consistent\n";
        };
    });

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate a policy on demonstrations or on one world");
    eval->add_option("--domain", domain_path)->required();
    eval->add_option("--policy", policy_path)->required();
    auto* eval_demos = eval->add_option("--demos", demos_path, "Print the chosen action for each record");
    eval->add_option("--world", world_json, "JSON object of input bindings")->excludes(eval_demos);
    eval->add_option("--start", start_action, "Previous action for --world");
    eval->callback([&] {
        action = [&] {
            DomainDef d = domain();
            Policy p = policy_of(policy_path, d);
            if (!world_json.empty()) {
                Json line = {{"start", start_action.empty() ? d.default_action : start_action},
                             {"next", d.default_action},
                             {"world", Json::parse(world_json)}};
                Demonstration demo = parse_demo(line.dump(), d);
                std::cout << eval_policy(p, demo.world) << '\n';
                return;
            }
            if (demos_path.empty()) throw CLI::RequiredError("--demos or --world");
            for (const Demonstration& demo : demos_of(demos_path, d)) std::cout << eval_policy(p, demo.world) << '\n';
        };
    });

    // enum-stats
    auto* stats = app.add_subcommand("enum-stats", "Count enumerated features per pruning mode and depth");
    stats->add_option("--domain", domain_path)->required();
    stats->add_option("--demos", demos_path)->required();
    stats->add_option("--modes", modes, "Comma-separated pruning modes");
    stats->add_option("--out", out_path, "CSV file (stdout if omitted)");
    stats->callback([&] {
        action = [&] {
            DomainDef d = domain();
            std::vector<WorldState> worlds;
            for (const Demonstration& demo : demos_of(demos_path, d)) worlds.push_back(demo.world);
            std::vector<EnumConfig> cfgs;
            std::stringstream ms(modes);
            for (std::string m; std::getline(ms, m, ',');) {
                EnumConfig c = synth_config(g).enum_config();
                bool known = false;
                for (PruningMode pm : {PruningMode::Full, PruningMode::DimensionOnly, PruningMode::SignatureOnly,
                                       PruningMode::None}) {
                    if (to_string(pm) == m) {
                        c.mode = pm;
                        known = true;
                    }
                }
                if (!known) throw CLI::ValidationError("--modes", "unknown pruning mode '" + m + "'");
                cfgs.push_back(c);
            }
            const auto t0 = std::chrono::steady_clock::now();
            std::ostringstream csv;
            csv << "mode,depth,count\n";
            for (const CountRow& r : enum_count_report(cfgs, make_env(d), worlds))
                csv << to_string(r.mode) << ',' << r.depth << ',' << r.count << '\n';
            report.j["timing"]["enumeration"] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            emit(out_path, csv.str());
        };
    });

    // repair
    auto* rep = app.add_subcommand("repair", "Adjust a policy's thresholds to satisfy corrections");
    rep->add_option("--domain", domain_path)->required();
    rep->add_option("--policy", policy_path)->required();
    rep->add_option("--corrections", corrections_path)->required();
    rep->add_option("--out", out_path, "Repaired policy file (stdout if omitted)");
    rep->add_option("--adjustments", csv_path, "Adjustment CSV (stdout if omitted)");
    rep->callback([&] {
        action = [&] {
            DomainDef d = domain();
            Policy p = policy_of(policy_path, d);
            std::vector<Demonstration> corr = demos_of(corrections_path, d);
            SolveOptions so = synth_config(g).solve_options();
            const auto t0 = std::chrono::steady_clock::now();
            RepairResult r = repair(p, corr, so);
            report.j["timing"]["solving"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            report.j["counts"]["corrections"] = corr.size();
            if (!r.sat) throw Verdict{kUnsat, "UNSAT: " + r.reason};
            std::ostringstream csv;
            csv << "name,old,delta,new\n";
            for (const Adjustment& a : r.adjustments)
                csv << a.name << ',' << format_number(a.old_value) << ',' << format_number(a.delta) << ','
                    << format_number(a.new_value) << '\n';
            emit(out_path, print_policy(r.policy));
            emit(csv_path, csv.str());
        };
    });

    // simulate
    auto* sim = app.add_subcommand("simulate", "Score a policy over a grid of start states");
    sim->add_option("--domain", domain_path)->required();
    sim->add_option("--policy", policy_path)->required();
    sim->add_option("--grid", grid, "Grid size NXxNY");
    sim->add_option("--seed", seed, "Seed for start velocities and robot positions");
    sim->add_option("--perturb", factors, "Physics factors, e.g. friction=1.5 accel=0.8");
    sim->add_option("--csv", csv_path, "Per-cell outcome CSV");
    sim->callback([&] {
        action = [&] {
            DomainDef d = domain();
            Policy p = policy_of(policy_path, d);
            SimConfig c = sim_config();
            auto [nx, ny] = parse_grid(grid);
            std::vector<StartState> cells = start_grid(c, nx, ny, seed);
            ScoreResult r = score(p, c, cells, g.serial ? Kernel::Serial : Kernel::Parallel, g.jobs);
            std::cout << format_number(r.rate) << '\n';
            if (!csv_path.empty()) write_file(csv_path, score_csv(r, cells, nx));
            report.j["counts"]["episodes"] = cells.size();
            report.j["rate"] = r.rate;
        };
    });

    // record
    auto* rec = app.add_subcommand("record", "Record demonstrations by running a policy");
    rec->add_option("--domain", domain_path)->required();
    rec->add_option("--policy", policy_path)->required();
    rec->add_option("--starts", starts, "Number of random start states")->check(CLI::NonNegativeNumber);
    rec->add_option("--seed", seed);
    rec->add_option("--stride", stride, "Keep every stride-th step (and the last)")->check(CLI::PositiveNumber);
    rec->add_option("--perturb", factors);
    rec->add_option("--out", out_path, "Demo file (stdout if omitted)");
    rec->callback([&] {
        action = [&] {
            DomainDef d = domain();
            Policy p = policy_of(policy_path, d);
            SimConfig c = sim_config();
            std::vector<Demonstration> demos = record_demos(p, c, random_starts(c, starts, seed), stride);
            std::string text;
            for (const Demonstration& demo : demos) text += demo_to_json(demo, d) + "\n";
            emit(out_path, text);
            report.j["counts"]["demos"] = demos.size();
        };
    });

    // corrections
    auto* cor = app.add_subcommand("corrections",
                                   "Collect corrections from failed kicks under perturbed physics, repairing as it goes");
    cor->add_option("--domain", domain_path)->required();
    cor->add_option("--policy", policy_path)->required();
    cor->add_option("--grid", grid);
    cor->add_option("--seed", seed);
    cor->add_option("--perturb", factors);
    cor->add_option("--max", max_corrections, "At most this many corrections")->check(CLI::PositiveNumber);
    cor->add_option("--out", out_path, "Corrections file (stdout if omitted)");
    cor->callback([&] {
        action = [&] {
            DomainDef d = domain();
            Policy p = policy_of(policy_path, d);
            SimConfig c = sim_config();
            auto [nx, ny] = parse_grid(grid);
            RepairLoopResult r =
                repair_from_failures(p, c, start_grid(c, nx, ny, seed), max_corrections, synth_config(g).solve_options());
            std::string text;
            for (const Demonstration& demo : r.corrections) text += demo_to_json(demo, d) + "\n";
            emit(out_path, text);
            report.j["counts"]["corrections"] = r.corrections.size();
            report.j["rate_before"] = r.before;
            report.j["rate_after"] = r.after;
        };
    });

    const auto t0 = std::chrono::steady_clock::now();
    int code = kOk;
    std::string outcome = "ok";
    try {
        app.parse(argc, argv);
        report.j["subcommand"] = app.get_subcommands().front()->get_name();
        action();
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        code = kUsage;
        outcome = "usage";
    } catch (const Verdict& v) {
        std::cerr << v.message << '\n';
        code = v.code;
        outcome = v.code == kUnsat ? "unsat" : "invalid";
    } catch (const CapacityExceeded& e) {
        std::cerr << "capacity: " << e.what() << '\n';
        code = kCapacity;
        outcome = "capacity";
    } catch (const IoError& e) {
        std::cerr << "io: " << e.what() << '\n';
        code = kUsage;
        outcome = "io";
    } catch (const ParseError& e) {
        std::cerr << "parse: " << e.what() << '\n';
        code = kInvalid;
        outcome = "invalid";
    } catch (const Error& e) {
        std::cerr << "invalid: " << e.what() << '\n';
        code = kInvalid;
        outcome = "invalid";
    } catch (const Json::exception& e) {
        std::cerr << "invalid: " << e.what() << '\n';
        code = kInvalid;
        outcome = "invalid";
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage: " << e.what() << '\n';
        code = kUsage;
        outcome = "usage";
    }
    report.j["timing"]["total"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.j["outcome"] = outcome;
    report.j["exit_code"] = code;
    try {
        if (g.report.empty())
            std::cerr << report.j.dump() << '\n';
        else
            write_file(g.report, report.j.dump(2) + "\n");
    } catch (const IoError& e) {
        std::cerr << "io: " << e.what() << '\n';
        if (code == kOk) code = kUsage;
    }
    return code;
}
