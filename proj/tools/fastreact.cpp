#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fastreact/analysis.hpp"
#include "fastreact/barriers.hpp"
#include "fastreact/error.hpp"
#include "fastreact/problem.hpp"
#include "fastreact/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fastreact;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kConfig = 2;

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string short_num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

// Output directory with the no-overwrite rule applied to every file we write.
class OutputDir {
public:
    OutputDir(std::string dir, bool force) : dir_(std::move(dir)), force_(force) {}

    void claim(const std::vector<std::string>& names) const {
        if (dir_.empty()) throw ConfigError("an output directory is required (-o)");
        for (const auto& n : names)
            if (!force_ && fs::exists(fs::path(dir_) / n))
                throw ConfigError("refusing to overwrite " + (fs::path(dir_) / n).string() + " (pass --force)");
        fs::create_directories(dir_);
    }

    std::string path(const std::string& name) const { return (fs::path(dir_) / name).string(); }

    void write(const std::string& name, const std::string& text) const {
        std::ofstream f(path(name), std::ios::binary);
        if (!f) throw ConfigError("cannot write " + path(name));
        f << text;
        if (text.empty() || text.back() != '\n') f << '\n';
    }

    bool empty() const { return dir_.empty(); }

private:
    std::string dir_;
    bool force_;
};

json check_json(const Check& c) {
    json j{{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}};
    if (c.informational) j["informational"] = true;
    if (!c.detail.empty()) j["detail"] = c.detail;
    return j;
}

json report_json(const ResidualReport& r) {
    json ineqs = json::array();
    for (const auto& q : r.inequalities)
        ineqs.push_back({{"name", q.name},
                         {"min_residual", q.min_residual},
                         {"location", q.location},
                         {"scale", q.scale},
                         {"pass", q.pass}});
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back(check_json(c));
    return {{"inequalities", ineqs}, {"checks", checks}, {"all_pass", r.all_pass()}};
}

json location_json(const NodeLocation& l, int dim) {
    json j{{"node", l.node}, {"x", l.x}, {"t", l.t}};
    if (dim == 2) j["y"] = l.y;
    return j;
}

json comparison_json(const ComparisonReport& r, int dim) {
    return {{"pass", r.pass},
            {"tolerance", r.tolerance},
            {"worst_margin", r.worst_margin},
            {"component", r.component},
            {"location", location_json(r.location, dim)}};
}

json dominance_json(const DominanceReport& r, int dim) {
    return {{"pass", r.pass},         {"tolerance", r.tolerance},   {"worst_margin", r.worst_margin},
            {"component", r.component}, {"checked", r.checked}, {"location", location_json(r.location, dim)}};
}

json scan_json(const ThresholdScan& s) {
    json entries = json::array();
    for (const auto& e : s.entries) entries.push_back({{"k", e.k}, {"pass", e.pass}, {"note", e.note}});
    json j{{"entries", entries}};
    j["threshold"] = s.threshold ? json(*s.threshold) : json(nullptr);
    return j;
}

void print_scan(const ThresholdScan& s) {
    for (const auto& e : s.entries)
        std::cout << "  k = " << short_num(e.k) << (e.pass ? "  pass" : "  FAIL") << (e.note.empty() ? "" : "  " + e.note)
                  << "\n";
    if (s.threshold)
        std::cout << "first passing power of ten: " << short_num(*s.threshold) << "\n";
    else
        std::cout << "no passing power of ten in the scanned range\n";
}

std::vector<std::string> with_k(std::vector<std::string> overrides, std::optional<double> k) {
    if (k) overrides.push_back("params.k=" + num(*k));
    return overrides;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string config;
    std::optional<double> k;
};

int simulate(const SimulateArgs& a, const std::vector<std::string>& overrides, const OutputDir& out) {
    const ProblemSpec spec = load_problem(a.config, with_k(overrides, a.k));
    out.claim({"trajectory.csv", "meta.json"});
    const auto [u0, v0] = eval_initial_data(spec);
    RunInvariants inv;
    const Trajectory traj = run(spec, &inv);
    write_trajectory_csv(traj, out.path("trajectory.csv"));

    const double u_cap = u0.max() + 1e-10;
    const bool v_zero = v0.max() == 0.0;
    std::vector<Check> checks{
        {"v_nonincreasing", inv.max_v_increase, 0.0, inv.max_v_increase <= 0.0, false, "max nodal increase per step"},
        {"u_nonnegative", inv.min_u, 0.0, inv.min_u >= 0.0, false, ""},
        {"u_bounded", inv.max_u, u_cap, inv.max_u <= u_cap, false, "max u0 + 1e-10"},
        {"mass_nonincreasing", inv.max_mass_increase, 1e-12, inv.max_mass_increase <= 1e-12, false,
         "max mass increase per step"},
    };
    if (v_zero) {
        const double drift = std::abs(traj.u.back().mass() - traj.u.front().mass());
        checks.push_back({"mass_conserved", drift, 1e-12, drift <= 1e-12, false, "v0 vanishes"});
    }
    bool ok = true;
    json cj = json::array();
    for (const auto& c : checks) {
        ok = ok && c.pass;
        cj.push_back(check_json(c));
    }
    json meta{{"command", "simulate"},
              {"config", to_toml(spec)},
              {"dt", traj.meta.dt},
              {"steps", traj.meta.steps},
              {"scheme", traj.meta.scheme},
              {"wall_seconds", traj.meta.wall_seconds},
              {"seed", spec.solver.seed},
              {"times", traj.times},
              {"invariants", cj},
              {"pass", ok}};
    out.write("meta.json", meta.dump(2));
    std::cout << "simulate: " << traj.meta.steps << " steps of dt = " << num(traj.meta.dt) << " ("
              << traj.meta.scheme << "), " << (ok ? "invariants hold" : "INVARIANT VIOLATED") << "\n";
    return ok ? kPass : kFail;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
    std::string config;
    std::vector<double> ks;
    double theta = 0.0;
};

int sweep(const SweepArgs& a, const std::vector<std::string>& overrides, const OutputDir& out) {
    const ProblemSpec spec = load_problem(a.config, overrides);
    out.claim({"convergence.csv", "convergence.json"});
    SweepOptions o;
    o.theta = a.theta;
    const ConvergenceReport r = k_sweep(spec, a.ks, o);
    write_convergence_csv(r, out.path("convergence.csv"));
    out.write("convergence.json", convergence_json(r));
    for (const auto& e : r.entries)
        std::cout << "  k = " << short_num(e.k) << "  sup|u_k - u_inf| = " << num(e.sup_u_err)
                  << "  v-deficit = " << num(e.v_deficit) << "  interface = " << num(e.interface_disp) << "\n";
    for (const auto& c : r.checks)
        std::cout << "  " << (c.pass ? "pass " : "FAIL ") << c.name << (c.informational ? " (informational)" : "")
                  << (c.detail.empty() ? "" : ": " + c.detail) << "\n";
    return r.all_pass() ? kPass : kFail;
}

// ---------------------------------------------------------------- verify-barriers

struct BarrierArgs {
    std::string lemma;
    double a1 = 1.0, m = 4.0;
    double a2 = 0.5, b2 = 1.0;
    TravelingParams traveling;
    double k_min = 1e2, k_max = 1e24;
    std::string threshold = "corrected";
};

int verify_barriers(const BarrierArgs& a, const OutputDir& out) {
    if (!(a.k_min > 0.0) || a.k_max < a.k_min) throw ConfigError("need 0 < k-min <= k-max");
    const CoshThreshold rule = a.threshold == "literal" ? CoshThreshold::Literal : CoshThreshold::Corrected;
    std::function<BarrierProfile(double)> build;
    if (a.lemma == "cosh") {
        CoshOptions o;
        o.threshold = rule;
        build = [&a, o](double k) { return cosh_barrier(a.a1, a.m, k, o); };
    } else if (a.lemma == "ode") {
        build = [&a](double k) { return ode_barrier(a.a2, a.b2, a.m, k); };
    } else {
        TravelingOptions o;
        o.threshold = rule;
        build = [&a, o](double k) { return traveling_supersolution(a.traveling, k, o); };
    }
    out.claim({"scan.json"});
    json reports = json::array();
    const ThresholdScan scan = scan_threshold(powers_of_ten(a.k_min, a.k_max), [&](double k) {
        const BarrierProfile p = build(k);
        reports.push_back(json::parse(barrier_report_json(p)));
        const bool pass = p.constructed && p.report.all_pass();
        return KScanEntry{k, pass, pass ? "" : (p.constructed ? p.report.first_failure() : p.failure)};
    });
    json j{{"construction", a.lemma}, {"scan", scan_json(scan)}, {"reports", reports}};
    out.write("scan.json", j.dump(2));
    std::cout << "verify-barriers (" << a.lemma << "):\n";
    print_scan(scan);
    return scan.threshold ? kPass : kFail;
}

// ---------------------------------------------------------------- assemble

struct AssembleArgs {
    std::string config;
    double d = 0.1, eps = 0.2;
    std::optional<double> k_min, k_max;
    std::size_t time_levels = 101;
};

int assemble(const AssembleArgs& a, const std::vector<std::string>& overrides, const OutputDir& out) {
    const ProblemSpec base = load_problem(a.config, overrides);
    out.claim({"assembly.json", "traveling.csv", "dominance.json"});
    GlobalOptions o;
    o.time_levels = a.time_levels;

    std::vector<double> ks{base.k};
    if (a.k_min || a.k_max) ks = powers_of_ten(a.k_min.value_or(base.k), a.k_max.value_or(base.k));
    auto at_k = [&](double k) {
        ProblemSpec s = base;
        s.k = k;
        return s;
    };
    std::optional<GlobalBarrier> chosen;
    const ThresholdScan scan = scan_threshold(ks, [&](double k) {
        GlobalBarrier gb = assemble_global_supersolution(at_k(k), a.d, a.eps, o);
        const bool pass = gb.constructed;
        const std::string note = gb.failure;
        if (pass && !chosen) chosen = std::move(gb);
        return KScanEntry{k, pass, note};
    });
    std::cout << "assemble (d = " << short_num(a.d) << ", eps = " << short_num(a.eps) << "):\n";
    print_scan(scan);

    json j{{"d", a.d}, {"eps", a.eps}, {"scan", scan_json(scan)}, {"config", to_toml(base)}};
    if (!scan.threshold) {
        out.write("assembly.json", j.dump(2));
        return kFail;
    }
    if (chosen->k != *scan.threshold) chosen = assemble_global_supersolution(at_k(*scan.threshold), a.d, a.eps, o);
    const GlobalBarrier& gb = *chosen;
    j["k"] = gb.k;
    j["s"] = gb.s;
    j["v_d"] = gb.v_d;
    j["a3"] = gb.a3;
    j["b3"] = gb.b3;
    j["c3"] = gb.c3;
    j["report"] = report_json(gb.report);
    j["heat_offset"] = gb.heat.offset;
    out.write("assembly.json", j.dump(2));
    write_barrier_csv(gb.traveling, out.path("traveling.csv"));

    const ProblemSpec spec = at_k(gb.k);
    const Trajectory traj = simulate_for_dominance(spec, gb);
    const DominanceReport dr = dominance_check(traj, gb, 1e-8);
    out.write("dominance.json", dominance_json(dr, spec.grid.dim()).dump(2));
    std::cout << "dominance at k = " << short_num(gb.k) << ": " << (dr.pass ? "pass" : "FAIL") << " (worst margin "
              << num(dr.worst_margin) << " in " << dr.component << " at x = " << num(dr.location.x)
              << ", t = " << num(dr.location.t) << ")\n";
    return dr.pass ? kPass : kFail;
}

// ---------------------------------------------------------------- compare

struct CompareArgs {
    std::string upper, lower;
    double tol = 1e-10;
};

int compare(const CompareArgs& a, const OutputDir& out) {
    for (const auto* p : {&a.upper, &a.lower})
        if (!fs::exists(*p)) throw ConfigError("no such trajectory: " + *p);
    const Trajectory up = read_trajectory_csv(a.upper);
    const Trajectory lo = read_trajectory_csv(a.lower);
    const ComparisonReport r = comparison_check(up, lo, a.tol);
    const json j = comparison_json(r, up.grid.dim());
    if (!out.empty()) {
        out.claim({"comparison.json"});
        out.write("comparison.json", j.dump(2));
    }
    std::cout << "compare: " << (r.pass ? "pass" : "FAIL") << " (worst margin " << num(r.worst_margin) << " in "
              << r.component << " at x = " << num(r.location.x) << ", t = " << num(r.location.t) << ")\n";
    return r.pass ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fast-reaction limit experiments: simulation, k-sweeps and barrier certification"};
    app.require_subcommand(1);

    std::string outdir;
    bool force = false;
    std::vector<std::string> overrides;
    auto common = [&](CLI::App* sub, bool with_config) {
        sub->add_option("-o,--output", outdir, "Output directory");
        sub->add_flag("--force", force, "Overwrite existing output files");
        if (with_config) sub->add_option("--set", overrides, "Config override section.key=value (repeatable)");
    };

    SimulateArgs sim;
    auto* s_sim = app.add_subcommand("simulate", "Run the simulator and write trajectory.csv and meta.json");
    s_sim->add_option("--config", sim.config, "Problem TOML")->required();
    s_sim->add_option("--k", sim.k, "Override params.k");
    common(s_sim, true);

    SweepArgs sw;
    auto* s_sw = app.add_subcommand("sweep", "Sweep k and compare against the heat reference");
    s_sw->add_option("--config", sw.config, "Problem TOML")->required();
    s_sw->add_option("--ks", sw.ks, "Increasing k values")->delimiter(',')->required();
    s_sw->add_option("--theta", sw.theta, "Interface level (default from config, then half of min v0)");
    common(s_sw, true);

    BarrierArgs ba;
    auto* s_ba = app.add_subcommand("verify-barriers", "Certify a barrier construction over powers of ten in k");
    s_ba->add_option("--lemma", ba.lemma, "Construction")
        ->required()
        ->check(CLI::IsMember({"cosh", "ode", "traveling"}));
    s_ba->add_option("--a1", ba.a1, "cosh: a1");
    s_ba->add_option("--m", ba.m, "cosh/ode: exponent m");
    s_ba->add_option("--a2", ba.a2, "ode: a2");
    s_ba->add_option("--b2", ba.b2, "ode: b2");
    s_ba->add_option("--s", ba.traveling.s, "traveling: speed s");
    s_ba->add_option("--a3", ba.traveling.a3, "traveling: a3");
    s_ba->add_option("--b3", ba.traveling.b3, "traveling: b3");
    s_ba->add_option("--c3", ba.traveling.c3, "traveling: c3");
    s_ba->add_option("--m3", ba.traveling.m3, "traveling: m3");
    s_ba->add_option("--m4", ba.traveling.m4, "traveling: m4");
    s_ba->add_option("--k-min", ba.k_min, "Smallest k");
    s_ba->add_option("--k-max", ba.k_max, "Largest k");
    s_ba->add_option("--threshold", ba.threshold, "Cosh threshold rule")
        ->check(CLI::IsMember({"corrected", "literal"}));
    common(s_ba, false);

    AssembleArgs as;
    auto* s_as = app.add_subcommand("assemble", "Assemble the global supersolution and check it against a fresh run");
    s_as->add_option("--config", as.config, "Problem TOML")->required();
    s_as->add_option("--d", as.d, "Enlargement width d");
    s_as->add_option("--eps", as.eps, "Sandwich width eps");
    s_as->add_option("--k-min", as.k_min, "Scan k from this power of ten");
    s_as->add_option("--k-max", as.k_max, "Scan k up to this power of ten");
    s_as->add_option("--time-levels", as.time_levels, "Barrier time levels");
    common(s_as, true);

    CompareArgs cmp;
    auto* s_cmp = app.add_subcommand("compare", "Check that one stored trajectory dominates another");
    s_cmp->add_option("--upper", cmp.upper, "Trajectory CSV expected to have larger u, smaller v")->required();
    s_cmp->add_option("--lower", cmp.lower, "Trajectory CSV expected to have smaller u, larger v")->required();
    s_cmp->add_option("--tol", cmp.tol, "Tolerance");
    common(s_cmp, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    const OutputDir out(outdir, force);
    try {
        if (*s_sim) return simulate(sim, overrides, out);
        if (*s_sw) return sweep(sw, overrides, out);
        if (*s_ba) return verify_barriers(ba, out);
        if (*s_as) return assemble(as, overrides, out);
        return compare(cmp, out);
    } catch (const NumericalError& e) {
        std::string where;
        if (!out.empty()) {
            try {
                fs::create_directories(outdir);
                out.write("error.json", json{{"error", "numerical"}, {"message", e.what()}}.dump(2));
                where = " (report: " + out.path("error.json") + ")";
            } catch (const std::exception&) {
            }
        }
        std::cerr << "numerical failure: " << e.what() << where << "\n";
        return kFail;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfig;
    } catch (const AssumptionError& e) {
        std::cerr << "assumption violated: " << e.what() << "\n";
        return kConfig;
    } catch (const PreconditionError& e) {
        std::cerr << "invalid request: " << e.what() << "\n";
        return kConfig;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kConfig;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "file error: " << e.what() << "\n";
        return kConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFail;
    }
}
