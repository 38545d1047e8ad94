#include <doctest.h>

#include <cmath>

#include "fastreact/barriers.hpp"
#include "fastreact/error.hpp"

using namespace fastreact;

namespace {

// Reference values from 40-digit mpmath closed forms and mpmath's Taylor ODE integrator.
constexpr double kXt_m4_k1e10 = 4.0988386307955745e-4;
constexpr double kInt_m4_k1e10 = 2.5e-6;
constexpr double kInt_m1_k1e9 = 0.063245553203367588;
constexpr double kBound_m1_k1e9 = 2.7089857778479849;
constexpr double kInt_m1_k1e13 = 0.013625841381159226;
constexpr double kBound_m1_k1e13 = 0.83463056740993952;
constexpr double kOdeU_k1e4 = 0.34531493890893036;
constexpr double kOdeDU_k1e4 = 2.7822732266313761;

const InequalityResult& ineq(const ResidualReport& r, const std::string& name) {
    for (const auto& q : r.inequalities)
        if (q.name == name) return q;
    FAIL("missing inequality " << name);
    return r.inequalities.front();
}

const Check& check(const ResidualReport& r, const std::string& name) {
    for (const auto& c : r.checks)
        if (c.name == name) return c;
    FAIL("missing check " << name);
    return r.checks.front();
}

BarrierProfile linear_profile(double slope, std::size_t n) {
    BarrierProfile p;
    p.kind = BarrierKind::Patched;
    p.pieces.push_back({"line", 0.0, 1.0, [=](double y) { return 1.0 + slope * y; }, [=](double) { return slope; },
                        [](double) { return 0.0; }});
    p.piece_begin = {0};
    for (std::size_t i = 0; i < n; ++i) {
        const double y = static_cast<double>(i) / static_cast<double>(n - 1);
        p.y.push_back(y);
        p.U.push_back(1.0 + slope * y);
        p.dU.push_back(slope);
    }
    return p;
}

}  // namespace

TEST_CASE("cosh_barrier: value at the origin is k^-2 exactly") {
    const BarrierProfile p = cosh_barrier(1.0, 1.0, 1e13);
    CHECK(p.eval_U(0.0) == 1.0 / (1e13 * 1e13));
    CHECK(p.eval_dU(0.0) == 0.0);
}

TEST_CASE("cosh_barrier: m = 4, k = 1e10 against closed forms") {
    const BarrierProfile p = cosh_barrier(1.0, 4.0, 1e10);
    REQUIRE(p.constructed);
    CHECK(p.breakpoint("x_tilde") == doctest::Approx(kXt_m4_k1e10).epsilon(1e-11));
    CHECK(cosh_threshold_closed_form(1.0, 4.0, 1e10) == doctest::Approx(kXt_m4_k1e10).epsilon(1e-13));
    CHECK(p.condition("integral")->value == doctest::Approx(kInt_m4_k1e10).epsilon(1e-10));
    CHECK(p.condition("x_tilde_window")->pass);
    CHECK(p.condition("integral")->pass);
    CHECK(p.condition("slope")->pass);
    CHECK(p.report.all_pass());
    CHECK(ineq(p.report, "cosh_identity").pass);
    CHECK(ineq(p.report, "cosh_convexity").pass);
}

TEST_CASE("cosh_barrier: m = 1 integral and its closed-form bound") {
    const BarrierProfile p9 = cosh_barrier(1.0, 1.0, 1e9);
    const BarrierProfile p13 = cosh_barrier(1.0, 1.0, 1e13);
    CHECK(p9.condition("integral")->value == doctest::Approx(kInt_m1_k1e9).epsilon(1e-10));
    CHECK(p13.condition("integral")->value == doctest::Approx(kInt_m1_k1e13).epsilon(1e-10));
    CHECK(p9.condition("integral_bound")->value == doctest::Approx(kBound_m1_k1e9).epsilon(1e-12));
    CHECK(p13.condition("integral_bound")->value == doctest::Approx(kBound_m1_k1e13).epsilon(1e-12));
    CHECK_FALSE(p9.condition("integral_bound")->pass);
    CHECK(p13.condition("integral_bound")->pass);
    CHECK(p13.condition("size")->pass);
}

TEST_CASE("cosh_barrier: literal threshold fails the slope condition where the corrected one passes") {
    CoshOptions lit;
    lit.threshold = CoshThreshold::Literal;
    CHECK(cosh_barrier(1.0, 4.0, 1e10).condition("slope")->pass);
    CHECK_FALSE(cosh_barrier(1.0, 4.0, 1e10, lit).condition("slope")->pass);
}

TEST_CASE("ode_barrier: first integral and endpoint against an independent integrator") {
    for (double k : {1e4, 1e6, 1e8}) {
        const BarrierProfile p = ode_barrier(0.5, 1.0, 2.0, k);
        CHECK(p.condition("first_integral")->value <= 1e-6);
        CHECK(p.condition("power_bound")->pass);
        if (k >= 1e6) CHECK(p.condition("endpoint_slope")->pass);
    }
    const BarrierProfile p = ode_barrier(0.5, 1.0, 2.0, 1e4);
    const double X = std::pow(1e4, -1.0 / 6.0);
    CHECK(p.eval_U(X) == doctest::Approx(kOdeU_k1e4).epsilon(1e-8));
    CHECK(p.eval_dU(X) == doctest::Approx(kOdeDU_k1e4).epsilon(1e-8));
}

TEST_CASE("ode_barrier: rejects parameters outside the lemma's ranges") {
    CHECK_THROWS_AS(ode_barrier(2.0, 1.0, 2.0, 1e4), ConfigError);
    CHECK_THROWS_AS(ode_barrier(0.5, 0.5, 2.0, 1e4), ConfigError);
    CHECK_THROWS_AS(ode_barrier(0.5, 1.0, 1.0, 1e4), ConfigError);
}

TEST_CASE("traveling_v_lower_bound: both exponent branches") {
    TravelingParams p;
    p.s = 0.1;
    p.b3 = 2.0;
    p.m4 = 1.0;
    CHECK(traveling_v_lower_bound(p) == doctest::Approx(2.0 * std::exp(-10.0)).epsilon(1e-15));
    p.m4 = 2.0;
    CHECK(traveling_v_lower_bound(p) == doctest::Approx(1.0 / 10.5).epsilon(1e-15));
}

TEST_CASE("traveling_supersolution: certified at large k with the exact conditions at 1/k") {
    TravelingParams p;
    p.s = 0.125;
    p.b3 = 0.5;
    const double k = 1e30;
    const BarrierProfile t = traveling_supersolution(p, k);
    REQUIRE(t.constructed);
    CHECK(t.report.all_pass());
    CHECK(check(t.report, "mo3").pass);
    CHECK(t.eval_U(1.0 / k) == 1.0 / (k * k));
    CHECK(t.eval_dU(1.0 / k) == 0.0);
    CHECK(check(t.report, "mo4").pass);
    CHECK(check(t.report, "monotone").pass);
    CHECK(t.breakpoint("y_hat") < 2.0 * std::pow(std::log(k), -0.25));
}

TEST_CASE("traveling_supersolution: convex junction reported below the threshold") {
    TravelingParams p;
    p.s = 0.125;
    p.b3 = 0.5;
    const BarrierProfile t = traveling_supersolution(p, 1e24);
    REQUIRE(t.constructed);
    CHECK_FALSE(check(t.report, "kink_y2").pass);
    CHECK_FALSE(t.report.all_pass());
}

TEST_CASE("traveling_supersolution: parameter validation") {
    TravelingParams p;
    p.s = 0.6;
    CHECK_THROWS_AS(traveling_supersolution(p, 1e10), ConfigError);
    p.s = 0.1;
    p.m3 = 1.0;
    p.m4 = 1.0;
    CHECK_THROWS_AS(traveling_supersolution(p, 1e10), ConfigError);
}

TEST_CASE("residual_scan: linear profile has zero second derivative") {
    const BarrierProfile p = linear_profile(0.7, 101);
    std::vector<Inequality> q{{"neg_d2", 1e-12, [](const SampleView& s) { return std::make_pair(-s.d2, 1.0); }}};
    const ResidualReport r = residual_scan(p, q);
    CHECK(r.inequalities[0].pass);
    CHECK(std::abs(r.inequalities[0].min_residual) <= 1e-12);
}

TEST_CASE("residual_scan: a corrupted sample fails at its location") {
    BarrierProfile p = linear_profile(0.7, 101);
    p.U[40] = -p.U[40];
    std::vector<Inequality> q{{"neg_d2", 1e-12, [](const SampleView& s) { return std::make_pair(-s.d2, 1.0); }}};
    const ResidualReport r = residual_scan(p, q);
    CHECK_FALSE(r.inequalities[0].pass);
    CHECK(r.inequalities[0].location == doctest::Approx(0.4));
}

TEST_CASE("residual_scan: refuses under-resolved pieces") {
    const BarrierProfile p = linear_profile(1.0, 10);
    std::vector<Inequality> q{{"any", 1e-8, [](const SampleView&) { return std::make_pair(0.0, 1.0); }}};
    CHECK_THROWS_AS(residual_scan(p, q), PreconditionError);
}

TEST_CASE("patch_min: single input is returned unchanged") {
    const PatchInput in{"one", 0.0, 1.0, [](double y) { return 1.0 + y * y; }, [](double y) { return 2.0 * y; },
                        [](double) { return 2.0; }, {}};
    const BarrierProfile p = patch_min({in}, VLaw{});
    CHECK(p.constructed);
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(p.U[i] == 1.0 + p.y[i] * p.y[i]);
        CHECK(p.index_map[i] == 1);
    }
}

TEST_CASE("patch_min: two constants on one window") {
    auto constant = [](std::string name, double c) {
        return PatchInput{std::move(name), 0.0, 1.0, [c](double) { return c; }, [](double) { return 0.0; },
                          [](double) { return 0.0; }, {}};
    };
    const BarrierProfile p = patch_min({constant("a", 1.0), constant("b", 2.0)}, VLaw{});
    CHECK(p.constructed);
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(p.U[i] == 1.0);
        CHECK(p.index_map[i] == 1);
    }
}

TEST_CASE("patch_min: gap violated at a window boundary") {
    // The lower input ends inside the window of the upper one while active.
    const PatchInput lo{"low", 0.0, 0.6, [](double) { return 1.0; }, [](double) { return 0.0; },
                        [](double) { return 0.0; }, {}};
    const PatchInput hi{"high", 0.4, 1.0, [](double) { return 2.0; }, [](double) { return 0.0; },
                        [](double) { return 0.0; }, {}};
    const BarrierProfile p = patch_min({lo, hi}, VLaw{});
    CHECK_FALSE(p.constructed);
    CHECK(p.failure.find("0.6") != std::string::npos);
}

TEST_CASE("patch_min: idempotent") {
    const PatchInput a{"a", 0.0, 1.0, [](double y) { return 1.0 + y; }, [](double) { return 1.0; },
                       [](double) { return 0.0; }, {}};
    const PatchInput b{"b", 0.0, 1.0, [](double y) { return 2.0 - y; }, [](double) { return -1.0; },
                       [](double) { return 0.0; }, {}};
    const VLaw law{1.0, 1.0, 2.0, 1.0};
    const BarrierProfile once = patch_min({a, b}, law);
    const BarrierProfile twice = patch_min({as_patch_input(once)}, law);
    REQUIRE(once.constructed);
    REQUIRE(twice.constructed);
    for (std::size_t i = 0; i < twice.size(); ++i) CHECK(twice.U[i] == once.eval_U(twice.y[i]));
    CHECK(once.breakpoint("switch_1") == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("patch_min: the traveling pieces re-patched reproduce the traveling profile") {
    TravelingParams tp;
    tp.s = 0.125;
    tp.b3 = 0.5;
    const double k = 1e30;
    const BarrierProfile t = traveling_supersolution(tp, k);
    REQUIRE(t.constructed);
    const double y2 = t.breakpoint("y2");
    const double c = std::sqrt(t.params.gamma * k);
    PatchInput cosh_in{"cosh", 0.0, t.breakpoint("y1"), t.pieces[1].U, t.pieces[1].dU, t.pieces[1].d2U, {}};
    PatchInput quad_in{"quadratic", y2 - 0.01 / c, t.breakpoint("y_hat"), t.pieces[2].U, t.pieces[2].dU,
                       t.pieces[2].d2U, {}};
    const BarrierProfile p = patch_min({cosh_in, quad_in}, VLaw{tp.b3, k / tp.s, tp.m3, tp.m4});
    CHECK(p.constructed);
    double worst = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
        worst = std::max(worst, std::abs(p.eval_U(t.y[i]) - t.U[i]) / std::max(1.0, std::abs(t.U[i])));
    CHECK(worst <= 1e-10);
}

TEST_CASE("constructions are deterministic") {
    TravelingParams tp;
    tp.s = 0.125;
    tp.b3 = 0.5;
    const BarrierProfile a = traveling_supersolution(tp, 1e28);
    const BarrierProfile b = traveling_supersolution(tp, 1e28);
    CHECK(a.y == b.y);
    CHECK(a.U == b.U);
    CHECK(a.V == b.V);
    CHECK(barrier_report_json(a) == barrier_report_json(b));
}

TEST_CASE("threshold scan over powers of ten") {
    const auto ks = powers_of_ten(1e2, 1e6);
    REQUIRE(ks.size() == 5);
    CHECK(ks.front() == 100.0);
    CHECK(ks.back() == 1e6);
    const ThresholdScan s = scan_threshold(ks, [](double k) { return KScanEntry{k, k != 1e2 && k != 1e4, ""}; });
    REQUIRE(s.threshold);
    CHECK(*s.threshold == 1e5);
    const ThresholdScan none = scan_threshold(ks, [](double k) { return KScanEntry{k, k < 1e6, ""}; });
    CHECK_FALSE(none.threshold);
}
