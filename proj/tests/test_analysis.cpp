#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "fastreact/analysis.hpp"
#include "fastreact/error.hpp"
#include "fastreact/simulator.hpp"

using namespace fastreact;

namespace {

ProblemSpec small_p1(double k = 1e3, double m3 = 2.0, double m4 = 1.0, double T = 0.02) {
    ProblemSpec s = canonical_problem(101, k, m3, m4, T);
    s.solver.snapshots = 5;
    return s;
}

}  // namespace

TEST_CASE("comparison_check: identical and swapped trajectories") {
    const ProblemSpec s = small_p1();
    const Trajectory a = run(s);
    const ComparisonReport same = comparison_check(a, a, 0.0);
    CHECK(same.pass);
    CHECK(same.worst_margin == 0.0);

    auto [u0, v0] = eval_initial_data(s);
    Field u1 = u0, v1 = v0;
    for (auto& x : u1.values) x += 0.1;
    for (auto& x : v1.values) x *= 0.9;
    const std::vector<double> times = uniform_times(s.T, 5);
    const double dt = policy_dt(s, v0.max());
    const Trajectory hi = run_from(u1, v1, {s.k, s.m3, s.m4}, times, dt);
    const Trajectory lo = run_from(u0, v0, {s.k, s.m3, s.m4}, times, dt);
    CHECK(comparison_check(hi, lo, 1e-10).pass);
    const ComparisonReport swapped = comparison_check(lo, hi, 1e-10);
    CHECK_FALSE(swapped.pass);
    CHECK(swapped.worst_margin < 0.0);
}

TEST_CASE("comparison_check: grid mismatch is a configuration error") {
    const Trajectory a = run(small_p1());
    ProblemSpec other = canonical_problem(51, 1e3, 2.0, 1.0, 0.02);
    other.solver.snapshots = 5;
    CHECK_THROWS_AS(comparison_check(a, run(other), 0.0), ConfigError);
}

TEST_CASE("random ordered pairs keep their order") {
    OrderedPairOptions o;
    o.pairs = 3;
    const OrderedPairSummary r = random_ordered_pairs(small_p1(), o);
    CHECK(r.pass);
    CHECK(r.reports.size() == 3);
    CHECK(r.worst_margin >= -1e-10);
    const OrderedPairSummary again = random_ordered_pairs(small_p1(), o);
    CHECK(again.worst_margin == r.worst_margin);
}

TEST_CASE("interface_position: initial crossings and absorbed verdict") {
    const ProblemSpec s = canonical_problem(801);
    const auto [u0, v0] = eval_initial_data(s);
    const auto x = interface_position(v0, 0.5, s.geometry);
    REQUIRE(x.size() == 2);
    const double h = s.grid.spacing(0);
    CHECK_FALSE(x[0].absorbed);
    CHECK(std::abs(x[0].position + 0.3) <= h);
    CHECK(std::abs(x[1].position - 0.3) <= h);

    Field high(s.grid);
    for (auto& v : high.values) v = 1.0;
    const auto none = interface_position(high, 0.5, s.geometry);
    CHECK(none[0].absorbed);
    CHECK(none[1].absorbed);
    CHECK(default_theta(s) == 0.5);
}

TEST_CASE("interface_position: disk interface in two dimensions") {
    const Grid g = Grid::make_2d({0.0, 1.0}, 81, {0.0, 1.0}, 81);
    const SupportGeometry geo(DiskComplement{{0.5, 0.5}, 0.25}, {{0.0, 1.0}, {0.0, 1.0}});
    Field v(g);
    for (std::size_t n = 0; n < g.size(); ++n) {
        const auto p = g.position(n);
        v[n] = geo.signed_distance(p[0], p[1]) <= 0 ? 1.0 : 0.0;
    }
    const auto x = interface_position(v, 0.5, geo);
    REQUIRE(x.size() == 1);
    CHECK(std::abs(x[0].position) <= g.spacing(0));
}

TEST_CASE("k_sweep: report fields, checks and exports") {
    const ProblemSpec s = small_p1();
    const ConvergenceReport r = k_sweep(s, {1e2, 1e3});
    REQUIRE(r.entries.size() == 2);
    CHECK(r.entries[0].dt == r.entries[1].dt);
    for (const auto& e : r.entries) {
        CHECK(std::isfinite(e.sup_u_err));
        CHECK(e.sup_u_err >= 0.0);
        CHECK(e.v_deficit >= 0.0);
        CHECK(e.sup_u_err >= e.max_u_on_support);
        CHECK(e.min_u_minus_uinf >= -1e-8);
    }
    CHECK(r.entries[1].sup_u_err < r.entries[0].sup_u_err);

    const auto dir = std::filesystem::temp_directory_path() / "fastreact_test_sweep";
    std::filesystem::create_directories(dir);
    write_convergence_csv(r, (dir / "sweep.csv").string());
    std::ifstream f(dir / "sweep.csv");
    std::string header;
    std::getline(f, header);
    CHECK(header == "k,sup_u_err,v_deficit,interface_disp,dt,h");
    const auto j = nlohmann::json::parse(convergence_json(r));
    CHECK(j["entries"].size() == 2);
    CHECK(convergence_json(r) == convergence_json(k_sweep(s, {1e2, 1e3})));
}

TEST_CASE("k_sweep: rejects a decreasing k list and an interior touching the interface") {
    ProblemSpec s = small_p1();
    CHECK_THROWS_AS(k_sweep(s, {1e3, 1e2}), ConfigError);
    s.analysis.interior = {{{0.29, 0.9}}};
    CHECK_THROWS_AS(k_sweep(s, {1e2}), ConfigError);
}

TEST_CASE("dominance_check: trivial barrier passes, scaled barrier fails with a location") {
    const ProblemSpec s = small_p1();
    const Trajectory tr = run(s);
    const auto [u0, v0] = eval_initial_data(s);
    std::vector<Field> U, V;
    std::vector<std::vector<unsigned char>> region;
    for (double t : tr.times) {
        Field a(s.grid, t), b(s.grid, t);
        for (auto& x : a.values) x = u0.max() + 1.0;
        U.push_back(a);
        V.push_back(b);
        region.emplace_back(s.grid.size(), 1);
    }
    CHECK(dominance_check(tr, tr.times, U, V, region, 1e-8).pass);
    for (auto& f : U)
        for (auto& x : f.values) x *= 1e-3;
    const DominanceReport bad = dominance_check(tr, tr.times, U, V, region, 1e-8);
    CHECK_FALSE(bad.pass);
    CHECK(bad.component == "u");
    CHECK(bad.worst_margin < 0.0);
    region.pop_back();
    CHECK_THROWS_AS(dominance_check(tr, tr.times, U, V, region, 1e-8), ConfigError);
}

TEST_CASE("enlarged_heat_barrier: zero data gives the zero barrier") {
    ProblemSpec s = canonical_problem(201, 1e4, 2.0, 1.0, 0.02);
    s.initial.u0_outside = Expression::constant(0.0);
    const EnlargedHeatBarrier b = enlarged_heat_barrier(0.05, 0.1, s);
    CHECK(b.offset == 0.0);
    CHECK(b.sandwich());
    for (const auto& f : b.ubar.u) CHECK(f.max() == 0.0);
}

TEST_CASE("enlarged_heat_barrier: lower sandwich with nonincreasing offsets in d") {
    const ProblemSpec s = canonical_problem(201, 1e4, 2.0, 1.0, 0.1);
    double prev = INFINITY;
    for (double d : {0.1, 0.05, 0.025}) {
        const EnlargedHeatBarrier b = enlarged_heat_barrier(d, 0.1, s);
        CHECK(b.lower.pass);
        CHECK(b.offset <= prev);
        prev = b.offset;
    }
    CHECK_THROWS_AS(enlarged_heat_barrier(0.0, 0.1, s), ConfigError);
}

TEST_CASE("assemble_global_supersolution: speed, v_d and ordering at a certified k") {
    ProblemSpec s = canonical_problem(101, 1e28, 2.0, 1.0, 1.0);
    GlobalOptions o;
    o.time_levels = 11;
    const GlobalBarrier slow = assemble_global_supersolution(s, 0.1, 0.2, o);
    CHECK(slow.s == 0.0125);
    CHECK(slow.v_d == 1.0);
    CHECK(slow.b3 == 0.5);

    // Region 3 must sit many nodes deep: implicit steps spread u geometrically per node.
    s = canonical_problem(801, 1e28, 2.0, 1.0, 0.1);
    const GlobalBarrier gb = assemble_global_supersolution(s, 0.1, 0.2, o);
    CHECK(gb.s == 0.125);
    CHECK(gb.constructed);
    for (const auto& c : gb.report.checks)
        if (!c.informational) CHECK_MESSAGE(c.pass, c.name << ": " << c.detail);
    const Trajectory tr = simulate_for_dominance(s, gb);
    const DominanceReport dr = dominance_check(tr, gb, 1e-8);
    CHECK_MESSAGE(dr.pass, dr.component << " margin " << dr.worst_margin << " at x = " << dr.location.x
                                        << ", t = " << dr.location.t);
}
