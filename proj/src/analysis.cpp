#include "fastreact/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <random>

#include <json.hpp>

#include "fastreact/diffusion.hpp"
#include "fastreact/error.hpp"
#include "fastreact/simulator.hpp"

namespace fastreact {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

NodeLocation locate(const Grid& g, std::size_t n, double t) {
    const auto p = g.position(n);
    return {n, p[0], g.dim() == 2 ? p[1] : 0.0, t};
}

void require_same_times(const std::vector<double>& a, const std::vector<double>& b, const char* who) {
    if (a.size() != b.size()) throw ConfigError(std::string(who) + ": snapshot counts differ");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > 1e-12 * std::max(1.0, std::abs(a[i])))
            throw ConfigError(std::string(who) + ": snapshot times differ");
}

bool inside_boxes(const std::vector<std::vector<Extent>>& boxes, const std::array<double, 2>& p, int dim) {
    for (const auto& box : boxes) {
        bool in = true;
        for (int a = 0; a < dim && a < static_cast<int>(box.size()); ++a)
            in = in && p[a] >= box[a].lo && p[a] <= box[a].hi;
        if (in) return true;
    }
    return false;
}

}  // namespace

// ---------------------------------------------------------------- comparison

ComparisonReport comparison_check(const Trajectory& upper, const Trajectory& lower, double tol) {
    if (!(upper.grid == lower.grid)) throw ConfigError("comparison_check: grids differ");
    require_same_times(upper.times, lower.times, "comparison_check");
    ComparisonReport r;
    r.tolerance = tol;
    const Grid& g = upper.grid;
    for (std::size_t i = 0; i < upper.size(); ++i) {
        for (std::size_t n = 0; n < g.size(); ++n) {
            const double mu = upper.u[i][n] - lower.u[i][n];
            if (mu < r.worst_margin) r.worst_margin = mu, r.component = "u", r.location = locate(g, n, upper.times[i]);
            if (upper.has_v() && lower.has_v()) {
                const double mv = lower.v[i][n] - upper.v[i][n];
                if (mv < r.worst_margin) r.worst_margin = mv, r.component = "v", r.location = locate(g, n, upper.times[i]);
            }
        }
    }
    r.pass = r.worst_margin >= -tol;
    return r;
}

OrderedPairSummary random_ordered_pairs(const ProblemSpec& spec, const OrderedPairOptions& options) {
    const Grid& g = spec.grid;
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0), pos(0.0, 1.0);
    const std::vector<double> times = uniform_times(spec.T, spec.solver.snapshots);
    const ReactionParams p{spec.k, spec.m3, spec.m4};
    OrderedPairSummary out;
    out.seed = options.seed;

    // Smooth random field: a positive level plus a few cosine modes per axis.
    auto smooth = [&](double level, double amp) {
        std::vector<std::array<double, 3>> modes;
        for (std::size_t j = 1; j <= options.modes; ++j)
            modes.push_back({unit(rng) * amp / static_cast<double>(j), static_cast<double>(j), pos(rng) * 6.283185307179586});
        std::vector<std::array<double, 3>> modes_y;
        if (g.dim() == 2)
            for (std::size_t j = 1; j <= options.modes; ++j)
                modes_y.push_back(
                    {unit(rng) * amp / static_cast<double>(j), static_cast<double>(j), pos(rng) * 6.283185307179586});
        Field f(g);
        for (std::size_t n = 0; n < g.size(); ++n) {
            const auto x = g.position(n);
            double val = level;
            const double sx = 3.141592653589793 * (x[0] - g.extent(0).lo) / g.extent(0).length();
            for (const auto& m : modes) val += m[0] * std::cos(m[1] * sx + m[2]);
            if (g.dim() == 2) {
                const double sy = 3.141592653589793 * (x[1] - g.extent(1).lo) / g.extent(1).length();
                for (const auto& m : modes_y) val += m[0] * std::cos(m[1] * sy + m[2]);
            }
            f[n] = std::max(0.0, val);
        }
        return f;
    };

    double v_max = 0.0;
    std::vector<std::array<Field, 4>> pairs;
    for (std::size_t q = 0; q < options.pairs; ++q) {
        const Field u_lo = smooth(0.5 * pos(rng), 0.5);
        const Field v_hi = smooth(0.5 + 0.5 * pos(rng), 0.4);
        const Field du = smooth(0.2 * pos(rng), 0.2);
        const Field dv = smooth(0.2 * pos(rng), 0.2);
        Field u_hi = u_lo, v_lo = v_hi;
        for (std::size_t n = 0; n < g.size(); ++n) {
            u_hi[n] += du[n];
            v_lo[n] = std::max(0.0, v_hi[n] - dv[n]);
        }
        v_max = std::max(v_max, v_hi.max());
        pairs.push_back({u_hi, v_lo, u_lo, v_hi});
    }
    const double dt = policy_dt(spec, v_max);
    std::vector<std::future<ComparisonReport>> jobs;
    for (const auto& pr : pairs) {
        jobs.push_back(std::async(std::launch::async, [&, pr] {
            const Trajectory upper = run_from(pr[0], pr[1], p, times, dt);
            const Trajectory lower = run_from(pr[2], pr[3], p, times, dt);
            return comparison_check(upper, lower, options.tolerance);
        }));
    }
    for (auto& j : jobs) {
        const ComparisonReport r = j.get();
        out.worst_margin = std::min(out.worst_margin, r.worst_margin);
        out.pass = out.pass && r.pass;
        out.reports.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------- interface

double default_theta(const ProblemSpec& spec) {
    const auto [u0, v0] = eval_initial_data(spec);
    double m = kInf;
    for (double v : v0.values)
        if (v > 0) m = std::min(m, v);
    if (m == kInf) throw AssumptionError("default_theta: v0 has no positive value");
    return 0.5 * m;
}

std::vector<InterfaceCrossing> interface_position(const Field& v, double theta, const SupportGeometry& geometry) {
    const Grid& g = v.grid;
    if (g.dim() != geometry.dim()) throw ConfigError("interface_position: grid and geometry dimensions differ");
    std::vector<InterfaceCrossing> out;
    auto cross = [&](double a, double b) { return (a - theta) * (b - theta) <= 0.0 && a != b; };
    if (g.dim() == 1) {
        const auto bps = geometry.boundary_points();
        for (std::size_t c = 0; c < bps.size(); ++c) {
            const double lo = c == 0 ? g.extent(0).lo : 0.5 * (bps[c - 1].x + bps[c].x);
            const double hi = c + 1 == bps.size() ? g.extent(0).hi : 0.5 * (bps[c].x + bps[c + 1].x);
            InterfaceCrossing best{true, 0.0};
            double dist = kInf;
            for (std::size_t i = 0; i + 1 < g.points(0); ++i) {
                const double a = v[i], b = v[i + 1];
                if (!cross(a, b)) continue;
                const double xa = g.coord(0, i), xb = g.coord(0, i + 1);
                const double x = xa + (theta - a) / (b - a) * (xb - xa);
                if (x < lo || x > hi) continue;
                if (std::abs(x - bps[c].x) < dist) dist = std::abs(x - bps[c].x), best = {false, x};
            }
            out.push_back(best);
        }
        return out;
    }
    // Two dimensions: one interface component for the supported shapes.
    double sum = 0.0;
    std::size_t count = 0;
    auto edge = [&](std::size_t n0, std::size_t n1) {
        const double a = v[n0], b = v[n1];
        if (!cross(a, b)) return;
        const double w = (theta - a) / (b - a);
        const auto p0 = g.position(n0), p1 = g.position(n1);
        sum += geometry.signed_distance(p0[0] + w * (p1[0] - p0[0]), p0[1] + w * (p1[1] - p0[1]));
        ++count;
    };
    for (std::size_t i = 0; i < g.points(0); ++i)
        for (std::size_t j = 0; j < g.points(1); ++j) {
            if (i + 1 < g.points(0)) edge(g.index(i, j), g.index(i + 1, j));
            if (j + 1 < g.points(1)) edge(g.index(i, j), g.index(i, j + 1));
        }
    out.push_back(count ? InterfaceCrossing{false, sum / static_cast<double>(count)} : InterfaceCrossing{true, 0.0});
    return out;
}

// ---------------------------------------------------------------- k sweep

bool ConvergenceReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass || c.informational; });
}

ConvergenceReport k_sweep(const ProblemSpec& spec, const std::vector<double>& ks, const SweepOptions& options) {
    spec.validate();
    if (ks.empty()) throw ConfigError("k_sweep: empty k list");
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (!(ks[i] > 0)) throw ConfigError("k_sweep: k must be positive");
        if (i > 0 && !(ks[i] > ks[i - 1])) throw ConfigError("k_sweep: k list must be increasing");
    }
    const Grid& g = spec.grid;
    const auto [u0, v0] = eval_initial_data(spec);
    const auto interior = options.interior.empty() ? spec.analysis.interior : options.interior;
    if (interior.empty()) throw ConfigError("k_sweep: no interior set configured");
    const Field rho = signed_distance_field(spec.geometry, g);
    const double h = g.min_spacing();
    std::vector<std::size_t> inner;
    for (std::size_t n = 0; n < g.size(); ++n) {
        if (!inside_boxes(interior, g.position(n), g.dim())) continue;
        if (rho[n] > -2.0 * h) throw ConfigError("k_sweep: interior set must stay 2 grid cells inside supp v0");
        inner.push_back(n);
    }
    if (inner.empty()) throw ConfigError("k_sweep: interior set contains no nodes");

    ConvergenceReport rep;
    rep.theta = options.theta > 0 ? options.theta : spec.analysis.theta > 0 ? spec.analysis.theta : default_theta(spec);
    rep.times = uniform_times(spec.T, spec.solver.snapshots);
    double dt = kInf;
    for (double k : ks) {
        ProblemSpec sk = spec;
        sk.k = k;
        dt = std::min(dt, policy_dt(sk, v0.max()));
    }
    const Trajectory uinf = heat_reference_solve(u0, spec.geometry, rep.times, dt);
    const auto x0 = interface_position(v0, rep.theta, spec.geometry);

    auto one = [&](double k) {
        SweepEntry e;
        e.k = k;
        e.dt = dt;
        e.h = h;
        const Trajectory tr = run_from(u0, v0, {k, spec.m3, spec.m4}, rep.times, dt);
        e.meta = tr.meta;
        e.min_u_minus_uinf = kInf;
        for (std::size_t i = 0; i < tr.size(); ++i) {
            double se = 0.0, vd = 0.0, disp = 0.0;
            std::size_t se_at = 0;
            for (std::size_t n = 0; n < g.size(); ++n) {
                const double diff = tr.u[i][n] - uinf.u[i][n];
                if (std::abs(diff) > se) se = std::abs(diff), se_at = n;
                e.min_u_minus_uinf = std::min(e.min_u_minus_uinf, diff);
                if (rho[n] <= 0) e.max_u_on_support = std::max(e.max_u_on_support, tr.u[i][n]);
            }
            for (std::size_t n : inner) vd = std::max(vd, v0[n] - tr.v[i][n]);
            const auto xs = interface_position(tr.v[i], rep.theta, spec.geometry);
            for (std::size_t c = 0; c < xs.size(); ++c) {
                if (xs[c].absorbed || x0[c].absorbed) {
                    e.absorbed = true;
                    disp = kInf;
                } else {
                    disp = std::max(disp, std::abs(xs[c].position - x0[c].position));
                }
            }
            e.sup_err_t.push_back(se);
            e.v_deficit_t.push_back(vd);
            e.disp_t.push_back(disp);
            if (se > e.sup_u_err) e.sup_u_err = se, e.sup_at = locate(g, se_at, tr.times[i]);
            e.v_deficit = std::max(e.v_deficit, vd);
            e.interface_disp = std::max(e.interface_disp, disp);
        }
        return e;
    };
    if (options.parallel) {
        std::vector<std::future<SweepEntry>> jobs;
        for (double k : ks) jobs.push_back(std::async(std::launch::async, one, k));
        for (auto& j : jobs) rep.entries.push_back(j.get());
    } else {
        for (double k : ks) rep.entries.push_back(one(k));
    }

    auto add = [&](std::string name, double value, double threshold, bool pass, std::string detail,
                   bool informational = false) {
        rep.checks.push_back({std::move(name), value, threshold, pass, informational, std::move(detail)});
    };
    char buf[256];
    {
        bool ok = true;
        double worst = -kInf;
        for (std::size_t i = 1; i < rep.entries.size(); ++i) {
            const double r = rep.entries[i].sup_u_err / rep.entries[i - 1].sup_u_err;
            worst = std::max(worst, r);
            ok = ok && rep.entries[i].sup_u_err < rep.entries[i - 1].sup_u_err;
        }
        add("sup_error_decreasing", worst, 1.0, ok, "largest ratio of successive sup errors");
    }
    {
        double worst = kInf;
        for (const auto& e : rep.entries) worst = std::min(worst, e.min_u_minus_uinf);
        add("lower_bound", worst, -options.lower_tolerance, worst >= -options.lower_tolerance, "min of u_k - u_inf");
    }
    {
        bool ok = rep.entries.size() > 1;
        double lo = kInf, hi = -kInf;
        for (std::size_t i = 1; i < rep.entries.size(); ++i) {
            const double r = rep.entries[i - 1].v_deficit / rep.entries[i].v_deficit;
            lo = std::min(lo, r);
            hi = std::max(hi, r);
            ok = ok && r >= 5.0 && r <= 20.0;
        }
        std::snprintf(buf, sizeof buf, "successive v-deficit ratios in [%.4g, %.4g], band [5, 20]", lo, hi);
        add("v_deficit_ratios", lo, 5.0, ok, buf);
    }
    {
        bool ok = true;
        for (std::size_t i = 1; i < rep.entries.size(); ++i)
            ok = ok && rep.entries[i].v_deficit <= rep.entries[i - 1].v_deficit;
        add("v_deficit_monotone", 0.0, 0.0, ok, "v-deficit nonincreasing along k", true);
    }
    {
        const auto& last = rep.entries.back();
        const bool ok = !last.absorbed && last.interface_disp <= 2.0 * h;
        std::snprintf(buf, sizeof buf, "displacement %.6g at k = %.6g against 2h = %.6g%s", last.interface_disp, last.k,
                      2.0 * h, last.absorbed ? " (absorbed)" : "");
        add("interface_stationary", last.interface_disp, 2.0 * h, ok, buf);
    }
    {
        bool ok = true;
        for (const auto& e : rep.entries) ok = ok && e.sup_u_err >= e.max_u_on_support;
        add("sup_error_sanity", 0.0, 0.0, ok, "sup error >= max of u_k on supp v0");
    }
    return rep;
}

void write_convergence_csv(const ConvergenceReport& report, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path);
    f << "k,sup_u_err,v_deficit,interface_disp,dt,h\n";
    char buf[256];
    for (const auto& e : report.entries) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", e.k, e.sup_u_err, e.v_deficit,
                      e.interface_disp, e.dt, e.h);
        f << buf;
    }
}

std::string convergence_json(const ConvergenceReport& report, int indent) {
    using nlohmann::json;
    auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
    json j;
    j["times"] = report.times;
    j["theta"] = report.theta;
    j["all_pass"] = report.all_pass();
    for (const auto& e : report.entries) {
        json je;
        je["k"] = e.k;
        je["sup_u_err"] = e.sup_u_err;
        je["sup_at"] = {{"x", e.sup_at.x}, {"y", e.sup_at.y}, {"t", e.sup_at.t}};
        je["v_deficit"] = e.v_deficit;
        je["interface_disp"] = num(e.interface_disp);
        je["absorbed"] = e.absorbed;
        je["min_u_minus_uinf"] = e.min_u_minus_uinf;
        je["max_u_on_support"] = e.max_u_on_support;
        je["dt"] = e.dt;
        je["h"] = e.h;
        je["steps"] = e.meta.steps;
        je["scheme"] = e.meta.scheme;
        je["sup_err_t"] = e.sup_err_t;
        je["v_deficit_t"] = e.v_deficit_t;
        json disp = json::array();
        for (double d : e.disp_t) disp.push_back(num(d));
        je["interface_disp_t"] = disp;
        j["entries"].push_back(je);
    }
    for (const auto& c : report.checks)
        j["checks"].push_back({{"name", c.name},
                               {"value", num(c.value)},
                               {"threshold", num(c.threshold)},
                               {"pass", c.pass},
                               {"informational", c.informational},
                               {"detail", c.detail}});
    return j.dump(indent);
}

// ---------------------------------------------------------------- dominance

DominanceReport dominance_check(const Trajectory& traj, const std::vector<double>& times, const std::vector<Field>& U,
                                const std::vector<Field>& V, const std::vector<std::vector<unsigned char>>& region,
                                double tol) {
    require_same_times(traj.times, times, "dominance_check");
    if (U.size() != times.size() || V.size() != times.size() || region.size() != times.size())
        throw ConfigError("dominance_check: barrier has the wrong number of time levels");
    const Grid& g = traj.grid;
    DominanceReport r;
    r.tolerance = tol;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(U[i].grid == g) || !(V[i].grid == g) || region[i].size() != g.size())
            throw ConfigError("dominance_check: barrier grid differs from the trajectory grid");
        for (std::size_t n = 0; n < g.size(); ++n) {
            if (!region[i][n]) continue;
            ++r.checked;
            const double mu = U[i][n] - traj.u[i][n];
            if (mu < r.worst_margin) r.worst_margin = mu, r.component = "u", r.location = locate(g, n, times[i]);
            if (traj.has_v()) {
                const double mv = traj.v[i][n] - V[i][n];
                if (mv < r.worst_margin) r.worst_margin = mv, r.component = "v", r.location = locate(g, n, times[i]);
            }
        }
    }
    r.pass = r.worst_margin >= -tol;
    return r;
}

DominanceReport dominance_check(const Trajectory& traj, const GlobalBarrier& barrier, double tol) {
    return dominance_check(traj, barrier.times, barrier.U, barrier.V, barrier.region, tol);
}

Trajectory simulate_for_dominance(const ProblemSpec& spec, const GlobalBarrier& barrier) {
    const auto [u0, v0] = eval_initial_data(spec);
    double hsum = 0.0;
    for (int a = 0; a < spec.grid.dim(); ++a) hsum += 1.0 / (spec.grid.spacing(a) * spec.grid.spacing(a));
    return run_from(u0, v0, {spec.k, spec.m3, spec.m4}, barrier.times, 1.0 / hsum);
}

}  // namespace fastreact
