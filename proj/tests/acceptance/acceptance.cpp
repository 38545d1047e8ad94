// One pass/fail line per acceptance criterion; exit status 1 if any fails.
// Diagnostics that are reported but not asserted go to indented lines.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "fastreact/analysis.hpp"
#include "fastreact/barriers.hpp"
#include "fastreact/diffusion.hpp"
#include "fastreact/error.hpp"
#include "fastreact/problem.hpp"
#include "fastreact/reaction.hpp"
#include "fastreact/simulator.hpp"

using namespace fastreact;

namespace {

// Tolerances and bands, as pinned by the acceptance list.
constexpr double kSplitTol = 5e-4;
constexpr double kRatioLo = 3.4, kRatioHi = 4.6;
constexpr double kHeatTol = 1e-3;
constexpr double kPairTol = 1e-10;
constexpr double kUCapTol = 1e-10;
constexpr double kMassConserveTol = 1e-12;
// Mass may not grow; the allowance is the rounding of one trapezoid sum.
constexpr double kMassRoundoff = 1e-14;
constexpr double kBoundM1 = 2.7, kBoundM1Tol = 0.3;
constexpr double kFirstIntegralTol = 1e-6;
constexpr double kResidualTol = 1e-8;
constexpr double kKMaxTraveling = 1e24;
constexpr double kSweepLowerTol = 1e-8;
constexpr double kDominanceTol = 1e-8;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string g(double x, int digits = 4) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

void note(const std::string& line) { std::printf("      %s\n", line.c_str()); }

bool criterion(int id, const char* name, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %d. %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
    std::fflush(stdout);
    return o.pass;
}

// ---------------------------------------------------------------- 1

double split_error(double k, double m3, double m4, double dt) {
    const Grid grid = Grid::make_1d({0.0, 1.0}, 3);
    Field u(grid), v(grid);
    for (auto& x : u.values) x = 1.0;
    for (auto& x : v.values) x = 1.0;
    const std::vector<double> times{0.0, 1.0};
    const Trajectory tr = run_from(u, v, {k, m3, m4}, times, dt);
    const auto [ur, vr] = point_ode_oracle(1.0, 1.0, k, m3, m4, 1.0);
    double err = 0.0;
    for (std::size_t n = 0; n < grid.size(); ++n)
        err = std::max({err, std::abs(tr.u.back()[n] - ur), std::abs(tr.v.back()[n] - vr)});
    return err;
}

Outcome splitting_vs_oracle() {
    bool ok = true;
    double worst = 0.0, rmin = INFINITY, rmax = 0.0;
    std::string bad;
    for (double k : {1.0, 10.0, 100.0})
        for (double m3 : {1.0, 2.0})
            for (double m4 : {1.0, 2.0, 3.0}) {
                const double e1 = split_error(k, m3, m4, 1e-3);
                const double e2 = split_error(k, m3, m4, 5e-4);
                const double r = e1 / e2;
                worst = std::max(worst, e1);
                rmin = std::min(rmin, r);
                rmax = std::max(rmax, r);
                if (!(e1 <= kSplitTol && r >= kRatioLo && r <= kRatioHi)) {
                    ok = false;
                    bad += " (k=" + g(k) + ", m3=" + g(m3) + ", m4=" + g(m4) + ": err " + g(e1) + ", ratio " + g(r) +
                           ")";
                }
            }
    return {ok, "max error " + g(worst) + " <= " + g(kSplitTol) + ", halving ratios in [" + g(rmin) + ", " +
                    g(rmax) + "] vs [3.4, 4.6] over 18 cases" + bad};
}

// ---------------------------------------------------------------- 2

double eigenmode_error(std::size_t points, double dt) {
    const ProblemSpec p1 = canonical_problem(points);
    const auto [u0, v0] = eval_initial_data(p1);
    const double T = 0.05;
    const std::vector<double> times{0.0, T};
    const Trajectory ref = heat_reference_solve(u0, p1.geometry, times, dt);
    const double c = std::numbers::pi / 0.6;
    const double decay = std::exp(-c * c * T);
    double err = 0.0;
    for (std::size_t n = 0; n < p1.grid.size(); ++n) {
        const double x = p1.grid.coord(0, n);
        const double exact = std::abs(x) < 0.3 ? decay * std::cos(c * x) : 0.0;
        err = std::max(err, std::abs(ref.u.back()[n] - exact));
    }
    return err;
}

Outcome heat_eigenmode() {
    const double e1 = eigenmode_error(801, 1e-5);
    const double e2 = eigenmode_error(1601, 2.5e-6);
    const double r = e1 / e2;
    return {e1 <= kHeatTol && r >= kRatioLo && r <= kRatioHi,
            "sup error " + g(e1) + " <= 1e-3 at grid 801, dt 1e-5; refinement ratio " + g(r) + " in [3.4, 4.6]"};
}

// ---------------------------------------------------------------- 3

Outcome comparison_preservation() {
    // Grid 201 keeps the 20 full runs well inside the one-minute budget.
    const ProblemSpec spec = canonical_problem(201, 1e4, 2.0, 1.0, 0.1);
    OrderedPairOptions o;
    o.pairs = 20;
    o.seed = spec.solver.seed;
    o.tolerance = kPairTol;
    const OrderedPairSummary r = random_ordered_pairs(spec, o);
    const double violation = std::max(0.0, -r.worst_margin);
    return {r.pass && violation <= kPairTol, std::to_string(r.reports.size()) + " pairs (seed " +
                                                 std::to_string(r.seed) + ", grid 201, k 1e4), worst violation " +
                                                 g(violation) + " <= 1e-10"};
}

// ---------------------------------------------------------------- 4

Outcome structural_invariants() {
    bool ok = true;
    std::string worst;
    double max_dv = -INFINITY, max_dm = -INFINITY, max_over = -INFINITY, min_u = INFINITY;
    auto record = [&](const std::string& name, const RunInvariants& inv, double u0_max) {
        const bool pass = inv.max_v_increase <= 0.0 && inv.min_u >= 0.0 && inv.max_u <= u0_max + kUCapTol &&
                          inv.max_mass_increase <= kMassRoundoff;
        if (!pass) {
            ok = false;
            worst += " " + name;
        }
        max_dv = std::max(max_dv, inv.max_v_increase);
        max_dm = std::max(max_dm, inv.max_mass_increase);
        max_over = std::max(max_over, inv.max_u - u0_max);
        min_u = std::min(min_u, inv.min_u);
    };
    std::size_t runs = 0;
    for (double k : {1e2, 1e3, 1e4})
        for (auto [m3, m4] : {std::pair{2.0, 1.0}, {1.0, 2.0}, {2.0, 3.0}}) {
            const ProblemSpec s = canonical_problem(401, k, m3, m4, 0.1);
            RunInvariants inv;
            run(s, &inv);
            record("P1(k=" + g(k) + ", m3=" + g(m3) + ", m4=" + g(m4) + ")", inv, eval_initial_data(s).first.max());
            ++runs;
        }
    {
        const Grid grid = Grid::make_2d({0.0, 1.0}, 41, {0.0, 1.0}, 41);
        ProblemSpec s = canonical_problem();
        s.geometry = SupportGeometry(DiskComplement{{0.5, 0.5}, 0.25}, {{0.0, 1.0}, {0.0, 1.0}});
        s.grid = grid;
        s.analysis = {};
        s.initial.u0_outside = Expression::parse("0.0625 - (x-0.5)^2 - (y-0.5)^2");
        s.k = 100.0;
        s.T = 0.01;
        RunInvariants inv;
        run(s, &inv);
        record("disk", inv, eval_initial_data(s).first.max());
        ++runs;
    }
    // v = 0: pure diffusion, mass conserved.
    const ProblemSpec s = canonical_problem(401, 1e4, 2.0, 1.0, 0.1);
    const auto [u0, v0] = eval_initial_data(s);
    const Field vz(s.grid);
    RunInvariants inv;
    const auto times = uniform_times(s.T, 11);
    const Trajectory tr = run_from(u0, vz, {s.k, s.m3, s.m4}, times, policy_dt(s, v0.max()), &inv);
    double drift = 0.0;
    for (const auto& f : tr.u) drift = std::max(drift, std::abs(f.mass() - u0.mass()));
    record("v=0", inv, u0.max());
    ++runs;
    const bool conserved = drift <= kMassConserveTol;
    return {ok && conserved, std::to_string(runs) + " runs: max v increase " + g(max_dv) + " (exact 0), min u " +
                                 g(min_u) + ", max u - |u0| " + g(max_over) + " <= 1e-10, max mass increase " +
                                 g(max_dm) + " <= 1e-14, v=0 mass drift " + g(drift) + " <= 1e-12" + worst};
}

// ---------------------------------------------------------------- 5

Outcome cosh_certification() {
    const BarrierProfile p4 = cosh_barrier(1.0, 4.0, 1e10);
    const bool m4_ok = p4.constructed && p4.condition("x_tilde_window")->pass && p4.condition("integral")->pass &&
                       p4.condition("slope")->pass;
    const BarrierProfile p9 = cosh_barrier(1.0, 1.0, 1e9);
    const BarrierProfile p13 = cosh_barrier(1.0, 1.0, 1e13);
    const Check* b9 = p9.condition("integral_bound");
    const Check* b13 = p13.condition("integral_bound");
    const bool m1_ok = b13->pass && !b9->pass && std::abs(b9->value - kBoundM1) <= kBoundM1Tol;

    // Quadrature route: every condition of the report. Bound route: the
    // closed-form integral estimate must hold as well.
    auto threshold = [](double m, bool bound) {
        const ThresholdScan s = scan_threshold(powers_of_ten(1e2, 1e20), [m, bound](double k) {
            const BarrierProfile p = cosh_barrier(1.0, m, k);
            const bool pass = p.constructed && p.report.all_pass() && (!bound || p.condition("integral_bound")->pass);
            return KScanEntry{k, pass, ""};
        });
        return s.threshold ? g(*s.threshold) : std::string("none <= 1e20");
    };
    note("m=4, k=1e10: x~ = " + g(p4.breakpoint("x_tilde"), 10) + ", quadrature integral " +
         g(p4.condition("integral")->value, 10) + ", U'(x~) = " + g(p4.condition("slope")->value) + " >= ln k");
    note("m=1 quadrature of the integral itself: " + g(p9.condition("integral")->value) + " at 1e9, " +
         g(p13.condition("integral")->value) + " at 1e13");
    note("thresholds over powers of ten, quadrature / bound route: m=4 " + threshold(4.0, false) + " / " +
         threshold(4.0, true) + ", m=1 " + threshold(1.0, false) + " / " + threshold(1.0, true));
    return {m4_ok && m1_ok, "m=4 at 1e10: window/integral/slope " + std::string(m4_ok ? "pass" : "FAIL") +
                                "; m=1 integral bound " + g(b13->value) + " < 1 at 1e13, " + g(b9->value) +
                                " at 1e9 (fails, expected 2.7 +- 0.3)"};
}

// ---------------------------------------------------------------- 6

Outcome ode_certification() {
    bool ok = true;
    std::string d;
    for (double k : {1e4, 1e6, 1e8}) {
        const BarrierProfile p = ode_barrier(0.5, 1.0, 2.0, k);
        const Check* fi = p.condition("first_integral");
        const Check* es = p.condition("endpoint_slope");
        const bool slope_needed = k >= 1e6;
        ok = ok && p.constructed && fi->value <= kFirstIntegralTol && (!slope_needed || es->pass);
        d += " k=" + g(k) + ": residual " + g(fi->value, 3) + (slope_needed ? ", slope " + g(es->value, 4) +
                                                                                    (es->pass ? " >= " : " < ") +
                                                                                    g(es->threshold, 4)
                                                                              : "") +
             ";";
    }
    const ThresholdScan s = scan_threshold(powers_of_ten(1e2, 1e48), [](double k) {
        return KScanEntry{k, ode_barrier(0.5, 1.0, 2.0, k).condition("k18_slope")->pass, ""};
    });
    note("k^(1/8) U' < U'' holds at every sample from k = " + (s.threshold ? g(*s.threshold) : "none <= 1e48") +
         " (reported, not asserted)");
    return {ok, "a2=0.5, b2=1:" + d};
}

// ---------------------------------------------------------------- 7

struct TravelingCase {
    double m3, m4;
};

KScanEntry probe_traveling(const TravelingParams& p, double k) {
    try {
        const BarrierProfile b = traveling_supersolution(p, k);
        const bool pass = b.constructed && b.report.all_pass();
        return {k, pass, pass ? "" : (b.constructed ? b.report.first_failure() : b.failure)};
    } catch (const ConfigError& e) {
        return {k, false, e.what()};
    }
}

// mo1..mo4 and the monotonicity pattern at a certified k.
bool traveling_conditions(const BarrierProfile& b) {
    bool ok = true;
    for (const auto& q : b.report.inequalities)
        if (q.name.rfind("mo", 0) == 0) ok = ok && q.pass && q.tolerance <= kResidualTol;
    for (const auto& c : b.report.checks)
        if (c.name.rfind("mo", 0) == 0 || c.name == "monotone" || c.name == "v_nonincreasing") ok = ok && c.pass;
    return ok;
}

Outcome traveling_certification() {
    bool ok = true;
    std::string d;
    for (const auto c : {TravelingCase{2.0, 1.0}, TravelingCase{1.0, 2.0}}) {
        TravelingParams p;
        p.s = 0.1;
        p.a3 = 1.0;
        p.b3 = 2.0;
        p.c3 = 2.0;
        p.m3 = c.m3;
        p.m4 = c.m4;
        const ThresholdScan s =
            scan_threshold(powers_of_ten(1e1, kKMaxTraveling), [&](double k) { return probe_traveling(p, k); });
        const std::string tag = "(m3=" + g(c.m3) + ", m4=" + g(c.m4) + ")";
        if (s.threshold) {
            const bool conds = traveling_conditions(traveling_supersolution(p, *s.threshold));
            ok = ok && conds;
            d += " " + tag + " certified from k=" + g(*s.threshold) + (conds ? "" : " but mo/monotone FAIL") + ";";
        } else {
            ok = false;
            d += " " + tag + " not certified for k <= 1e24 (at 1e24: " + s.entries.back().note + ");";
        }
        const ThresholdScan wide =
            scan_threshold(powers_of_ten(1e25, 1e40), [&](double k) { return probe_traveling(p, k); });
        note(tag + " diagnostic scan to 1e40: " + (wide.threshold ? "certified from " + g(*wide.threshold)
                                                                   : "none (" + wide.entries.back().note + ")"));
    }
    return {ok, "s=0.1, a3=1, b3=2, c3=2:" + d};
}

// ---------------------------------------------------------------- 8

Outcome desk_reproduction() {
    bool ok = true;
    std::string d;
    for (auto [m3, m4] : {std::pair{2.0, 1.0}, {1.0, 2.0}}) {
        ProblemSpec s = canonical_problem(801, 1e4, m3, m4, 0.1);
        s.analysis.interior = {{{-0.9, -0.45}}, {{0.45, 0.9}}};
        SweepOptions o;
        o.lower_tolerance = kSweepLowerTol;
        const ConvergenceReport r = k_sweep(s, {1e2, 1e3, 1e4, 1e5}, o);
        const std::string tag = "(m3=" + g(m3) + ", m4=" + g(m4) + ")";
        std::string errs, defs;
        for (const auto& e : r.entries) {
            errs += (errs.empty() ? "" : ", ") + g(e.sup_u_err, 3);
            defs += (defs.empty() ? "" : ", ") + g(e.v_deficit, 3);
        }
        note(tag + " sup|u_k - u_inf| = " + errs + "; v-deficit = " + defs + "; interface displacement at 1e5 = " +
             g(r.entries.back().interface_disp, 3) + " (2h = " + g(2 * r.entries.back().h, 3) + ")");
        std::string failed;
        for (const auto& c : r.checks) {
            if (c.informational) continue;
            note(tag + " " + c.name + ": " + (c.pass ? "pass" : "FAIL") + (c.detail.empty() ? "" : " (" + c.detail + ")"));
            if (!c.pass) failed += (failed.empty() ? "" : ", ") + c.name;
        }
        ok = ok && r.all_pass();
        d += " " + tag + (failed.empty() ? " all checks pass;" : " failed: " + failed + ";");
    }
    return {ok, "k in {1e2..1e5}, grid 801, T=0.1:" + d};
}

// ---------------------------------------------------------------- 9

Outcome dominance() {
    const double d = 0.1, eps = 0.2;
    const ProblemSpec base = canonical_problem(801, 1e4, 2.0, 1.0, 0.1);
    GlobalOptions o;
    o.time_levels = 101;
    auto at_k = [&](double k) {
        ProblemSpec s = base;
        s.k = k;
        return s;
    };
    const ThresholdScan scan = scan_threshold(powers_of_ten(1e20, 1e32), [&](double k) {
        const GlobalBarrier gb = assemble_global_supersolution(at_k(k), d, eps, o);
        return KScanEntry{k, gb.constructed, gb.failure};
    });
    if (!scan.threshold) return {false, "assembly not constructed for k <= 1e32"};
    const ProblemSpec spec = at_k(*scan.threshold);
    const GlobalBarrier gb = assemble_global_supersolution(spec, d, eps, o);
    const Trajectory tr = simulate_for_dominance(spec, gb);
    const DominanceReport r = dominance_check(tr, gb, kDominanceTol);
    return {r.pass, "assembly (P1, d=0.1, eps=0.2, grid 801) certified from k=" + g(*scan.threshold) +
                        "; worst margin " + g(r.worst_margin) + " in " + r.component + " over " +
                        std::to_string(r.checked) + " node-times (tolerance 1e-8)"};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"splitting vs point oracle", splitting_vs_oracle},
        {"heat reference eigenmode", heat_eigenmode},
        {"discrete comparison preservation", comparison_preservation},
        {"structural invariants", structural_invariants},
        {"cosh barrier certification", cosh_certification},
        {"ODE barrier certification", ode_certification},
        {"traveling supersolution certification", traveling_certification},
        {"k-sweep desk reproduction", desk_reproduction},
        {"global supersolution dominance", dominance},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i)
        if (!criterion(static_cast<int>(i + 1), criteria[i].first, criteria[i].second)) ++failed;
    std::printf("%d of %zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
