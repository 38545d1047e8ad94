#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fastreact/error.hpp"
#include "fastreact/expression.hpp"
#include "fastreact/geometry.hpp"
#include "fastreact/grid.hpp"
#include "fastreact/problem.hpp"

using namespace fastreact;

namespace {

constexpr double pi = std::numbers::pi;

const char* kP1Toml = R"toml(
[domain]
x = [-1.0, 1.0]

[support]
kind = "intervals"
intervals = [[-1.0, -0.3], [0.3, 1.0]]

[initial.u0]
outside = "cos(pi*x/0.6)"

[initial.v0]
inside = "1"

[params]
k = 1e4
m3 = 2
m4 = 1
T = 0.1

[grid]
points = [801]
)toml";

const char* kDiskToml = R"toml(
[domain]
x = [0.0, 1.0]
y = [0.0, 1.0]

[support]
kind = "disk"
center = [0.5, 0.5]
radius = 0.25

[initial.u0]
outside = "(0.0625 - (x-0.5)^2 - (y-0.5)^2)"

[params]
k = 100
T = 0.01

[grid]
points = [41, 41]
)toml";

// Brute-force distance from (x, y) to a densely sampled closed curve.
template <class Curve>
double sampled_distance(Curve curve, std::size_t samples, double x, double y) {
    double best = INFINITY;
    for (std::size_t i = 0; i < samples; ++i) {
        const auto p = curve(static_cast<double>(i) / static_cast<double>(samples));
        best = std::min(best, std::hypot(x - p[0], y - p[1]));
    }
    return best;
}

}  // namespace

TEST_CASE("build_grid: 1-D nodes and spacing") {
    const Grid g = Grid::make_1d({-1.0, 1.0}, 5);
    CHECK(g.spacing(0) == 0.5);
    CHECK(g.size() == 5);
    const double expected[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
    for (std::size_t i = 0; i < 5; ++i) CHECK(g.coord(0, i) == expected[i]);
}

TEST_CASE("build_grid: 2-D grid of 3x3 nodes") {
    const Grid g = Grid::make_2d({0.0, 1.0}, 3, {0.0, 1.0}, 3);
    CHECK(g.size() == 9);
    CHECK(g.spacing(0) == 0.5);
    CHECK(g.spacing(1) == 0.5);
    // lexicographic ordering, last axis fastest
    CHECK(g.position(1)[0] == 0.0);
    CHECK(g.position(1)[1] == 0.5);
    CHECK(g.position(3)[0] == 0.5);
    CHECK(g.position(3)[1] == 0.0);
}

TEST_CASE("build_grid: rejects fewer than 3 points and degenerate extents") {
    CHECK_THROWS_AS(Grid::make_1d({-1.0, 1.0}, 2), ConfigError);
    CHECK_THROWS_AS(Grid::make_1d({1.0, 1.0}, 5), ConfigError);
    CHECK_THROWS_AS(Grid::make_2d({0.0, 1.0}, 3, {0.0, 1.0}, 2), ConfigError);
}

TEST_CASE("Field: trapezoid mass and size check") {
    const Grid g = Grid::make_1d({0.0, 1.0}, 11);
    Field f(g, 0.0);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = 1.0;
    CHECK(f.mass() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(Field(g, std::vector<double>(3, 0.0), 0.0), ConfigError);
}

TEST_CASE("Expression: grammar") {
    CHECK(Expression::parse("1+2*3")(0) == 7.0);
    CHECK(Expression::parse("-2^2")(0) == -4.0);
    CHECK(Expression::parse("2^3^2")(0) == 512.0);
    CHECK(Expression::parse("cos(pi*x/0.6)")(0.3) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(Expression::parse("x*y + exp(0)")(2.0, 3.0) == 7.0);
    CHECK(Expression::parse("sin(pi/2)")(0) == doctest::Approx(1.0));
    CHECK(Expression::constant(0.1)(0) == 0.1);
    CHECK(Expression::parse("3").is_constant());
    CHECK_THROWS_AS(Expression::parse("1 +"), ConfigError);
    CHECK_THROWS_AS(Expression::parse("foo(x)"), ConfigError);
    CHECK_THROWS_AS(Expression::parse("(1"), ConfigError);
}

TEST_CASE("signed_distance: canonical 1-D geometry") {
    const ProblemSpec p1 = canonical_problem(801);
    CHECK(p1.geometry.signed_distance(0.0) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(p1.geometry.signed_distance(0.5) == doctest::Approx(-0.2).epsilon(1e-15));
    CHECK(p1.geometry.signed_distance(-0.5) == doctest::Approx(-0.2).epsilon(1e-15));
    CHECK(p1.geometry.signed_distance(0.3) == 0.0);
    CHECK(p1.geometry.signed_distance(-0.9) == doctest::Approx(-0.6).epsilon(1e-15));
}

TEST_CASE("signed_distance: disk complement matches brute-force boundary sampling") {
    const DiskComplement disk{{0.5, 0.5}, 0.25};
    const SupportGeometry geo(disk, {{0.0, 1.0}, {0.0, 1.0}});
    auto circle = [&](double s) {
        return std::array<double, 2>{0.5 + 0.25 * std::cos(2 * pi * s), 0.5 + 0.25 * std::sin(2 * pi * s)};
    };
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 12; ++trial) {
        const double x = unit(rng);
        const double y = unit(rng);
        const double brute = sampled_distance(circle, 2'000'000, x, y);
        const double inside_disk = std::hypot(x - 0.5, y - 0.5) < 0.25 ? 1.0 : -1.0;
        CHECK(std::abs(geo.signed_distance(x, y) - inside_disk * brute) <= 1e-10);
    }
}

TEST_CASE("signed_distance: rounded rectangle matches brute-force boundary sampling") {
    const RoundedRectComplement rr{{0.5, 0.5}, {0.3, 0.2}, 0.1};
    const SupportGeometry geo(rr, {{0.0, 1.0}, {0.0, 1.0}});
    // Perimeter parametrization: 4 straight sides and 4 quarter arcs.
    const double sx = 2 * (0.3 - 0.1);
    const double sy = 2 * (0.2 - 0.1);
    const double arc = 0.5 * pi * 0.1;
    const double perimeter = 2 * sx + 2 * sy + 4 * arc;
    auto curve = [&](double s) -> std::array<double, 2> {
        double t = s * perimeter;
        const double cx[4] = {0.7, 0.3, 0.3, 0.7};
        const double cy[4] = {0.6, 0.6, 0.4, 0.4};
        const double side[4] = {sx, sy, sx, sy};
        for (int q = 0; q < 4; ++q) {
            // arc around corner q, starting at angle q*pi/2
            if (t < arc) {
                const double ang = q * pi / 2 + t / 0.1;
                return {cx[q] + 0.1 * std::cos(ang), cy[q] + 0.1 * std::sin(ang)};
            }
            t -= arc;
            if (t < side[q]) {
                const int n = (q + 1) % 4;
                const double ang = (q + 1) * pi / 2;
                const double fx = cx[q] + 0.1 * std::cos(ang);
                const double fy = cy[q] + 0.1 * std::sin(ang);
                const double gx = cx[n] + 0.1 * std::cos(ang);
                const double gy = cy[n] + 0.1 * std::sin(ang);
                const double w = t / side[q];
                return {fx + w * (gx - fx), fy + w * (gy - fy)};
            }
            t -= side[q];
        }
        return {cx[0] + 0.1, cy[0]};
    };
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 8; ++trial) {
        const double x = unit(rng);
        const double y = unit(rng);
        const double brute = sampled_distance(curve, 2'000'000, x, y);
        const double rho = geo.signed_distance(x, y);
        CHECK(std::abs(std::abs(rho) - brute) <= 1e-9);
    }
}

TEST_CASE("signed_distance: eikonal property away from the interface") {
    const ProblemSpec disk = parse_problem(kDiskToml);
    const Grid& g = disk.grid;
    const double h = g.spacing(0);
    std::size_t checked = 0;
    for (std::size_t i = 1; i + 1 < g.points(0); ++i) {
        for (std::size_t j = 1; j + 1 < g.points(1); ++j) {
            const double x = g.coord(0, i);
            const double y = g.coord(1, j);
            if (std::abs(disk.geometry.signed_distance(x, y)) <= 2 * h) continue;
            if (std::hypot(x - 0.5, y - 0.5) < 2 * h) continue;  // rho has a kink at the centre
            const double gx = (disk.geometry.signed_distance(x + h, y) - disk.geometry.signed_distance(x - h, y)) / (2 * h);
            const double gy = (disk.geometry.signed_distance(x, y + h) - disk.geometry.signed_distance(x, y - h)) / (2 * h);
            const double norm = std::hypot(gx, gy);
            CHECK(norm >= 1 - 5 * h);
            CHECK(norm <= 1 + 5 * h);
            ++checked;
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("geometry: validation and derived quantities") {
    CHECK_THROWS_AS(SupportGeometry(IntervalSupport{{{-0.9, -0.3}, {0.3, 1.0}}}, {{-1.0, 1.0}}), ConfigError);
    CHECK_THROWS_AS(SupportGeometry(IntervalSupport{{{-1.0, 1.0}}}, {{-1.0, 1.0}}), ConfigError);
    CHECK_THROWS_AS(SupportGeometry(DiskComplement{{0.5, 0.5}, 0.6}, {{0.0, 1.0}, {0.0, 1.0}}), ConfigError);
    const ProblemSpec p1 = canonical_problem(101);
    CHECK(p1.geometry.reach() == doctest::Approx(0.7));
    CHECK(p1.geometry.hessian_bound(0.1) == 0.0);
    CHECK_THROWS_AS(p1.geometry.hessian_bound(0.8), PreconditionError);
    const auto r = p1.geometry.reflect(0.1);
    CHECK(r[0] == doctest::Approx(0.5));
    CHECK(p1.geometry.component_count() == 2);
}

TEST_CASE("eval_initial_data: canonical problem is valid and segregated") {
    const ProblemSpec p1 = canonical_problem(801);
    const auto [u0, v0] = eval_initial_data(p1);
    double worst = 0.0;
    for (std::size_t n = 0; n < u0.size(); ++n) worst = std::max(worst, u0[n] * v0[n]);
    CHECK(worst == 0.0);
    CHECK(u0.max() == doctest::Approx(1.0));
    CHECK(v0.min() == 0.0);
    CHECK(v0.max() == 1.0);
    // interface nodes belong to supp v0
    const std::size_t i03 = 520;  // x = 0.3
    CHECK(p1.grid.coord(0, i03) == doctest::Approx(0.3));
    CHECK(u0[i03] == 0.0);
    CHECK(v0[i03] == 1.0);
}

TEST_CASE("eval_initial_data: assumption violations") {
    SUBCASE("segregation") {
        auto spec = parse_problem(kP1Toml, {"initial.v0.outside=\"1\""});
        CHECK_THROWS_AS(eval_initial_data(spec), SegregationError);
    }
    SUBCASE("v0 identically zero") {
        auto spec = parse_problem(kP1Toml, {"initial.v0.inside=\"0\""});
        CHECK_THROWS_AS(eval_initial_data(spec), AssumptionError);
    }
    SUBCASE("u0 identically zero") {
        auto spec = parse_problem(kP1Toml, {"initial.u0.outside=\"0\""});
        CHECK_THROWS_AS(eval_initial_data(spec), AssumptionError);
    }
    SUBCASE("negative u0") {
        auto spec = parse_problem(kP1Toml, {"initial.u0.outside=\"-1\""});
        CHECK_THROWS_AS(eval_initial_data(spec), AssumptionError);
    }
}

TEST_CASE("eval_initial_data: deterministic") {
    const ProblemSpec disk = parse_problem(kDiskToml);
    const auto a = eval_initial_data(disk);
    const auto b = eval_initial_data(disk);
    CHECK(a.first.values == b.first.values);
    CHECK(a.second.values == b.second.values);
}

TEST_CASE("config: parse, overrides and rejection of unknown keys") {
    const ProblemSpec p = parse_problem(kP1Toml);
    CHECK(p.k == 1e4);
    CHECK(p.m3 == 2.0);
    CHECK(p.grid.points(0) == 801);
    CHECK(p.exponents_admit_convergence());

    const ProblemSpec q = parse_problem(kP1Toml, {"params.k=100", "grid.points=[101]"});
    CHECK(q.k == 100.0);
    CHECK(q.grid.points(0) == 101);

    CHECK_THROWS_AS(parse_problem(kP1Toml, {"params.kk=1"}), ConfigError);
    CHECK_THROWS_AS(parse_problem(std::string(kP1Toml) + "\n[extra]\na = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_problem(std::string(kP1Toml) + "\n[solver]\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_problem(kP1Toml, {"params.k=0"}), ConfigError);
    CHECK_THROWS_AS(parse_problem(kP1Toml, {"params.m3=0.5"}), ConfigError);
    CHECK_THROWS_AS(parse_problem("not toml ["), ConfigError);
    CHECK_THROWS_AS(load_problem("/nonexistent/p.toml"), ConfigError);
}

TEST_CASE("config: to_toml round trip is exact") {
    for (const auto* text : {kP1Toml, kDiskToml}) {
        const ProblemSpec p = parse_problem(text, {"solver.dt=1.2345678901234567e-5"});
        const ProblemSpec q = parse_problem(to_toml(p));
        CHECK(p == q);
    }
    const ProblemSpec c = canonical_problem(401, 1e3, 1.0, 2.0, 0.05);
    CHECK(parse_problem(to_toml(c)) == c);
}
