#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

#include "barrier_detail.hpp"
#include "fastreact/error.hpp"

namespace fastreact {

namespace {

double threshold_value(double m, double k, CoshThreshold rule) {
    if (m == 1.0) return 2.0 * std::pow(k, -2.0 / 3.0);
    const double e = rule == CoshThreshold::Corrected ? 1.0 / (2.0 * std::sqrt(m)) : 0.5 * std::sqrt(m);
    return std::pow(k, -e);
}

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[200];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

}  // namespace

double cosh_threshold_closed_form(double a1, double m, double k, CoshThreshold rule) {
    return std::acosh(threshold_value(m, k, rule) * k * k) / std::sqrt(a1 * k);
}

BarrierProfile cosh_barrier(double a1, double m, double k, const CoshOptions& options) {
    if (!(a1 > 0) || !(m >= 1) || !(k > 1)) throw ConfigError("cosh_barrier: need a1 > 0, m >= 1, k > 1");
    BarrierProfile prof;
    prof.kind = BarrierKind::Cosh;
    prof.params.a1 = a1;
    prof.params.k = k;
    prof.params.m3 = m;
    const detail::CoshPiece cp{k, std::sqrt(a1 * k), 0.0};
    const double target = threshold_value(m, k, options.threshold);
    const double log_kinv2 = -2.0 * std::log(k);
    auto log_gap = [&](double x) { return log_kinv2 + detail::log_cosh(cp.c * x) - std::log(target); };
    const double upper = (std::log(2.0 * target * k * k) + 1.0) / cp.c;
    const auto root = upper > 0 ? detail::bisect_root(log_gap, 0.0, upper) : std::nullopt;
    if (!root || *root <= 0.0) {
        prof.constructed = false;
        prof.failure = fmt("x_tilde not bracketed: threshold value %.3g is below U(0) = k^-2 = %.3g", target, 1.0 / (k * k));
        return prof;
    }
    const double xt = *root;
    prof.breakpoints = {{"x_tilde", xt}};
    auto U = [cp](double x) { return cp.U(x); };
    auto dU = [cp](double x) { return cp.dU(x); };
    auto d2U = [cp](double x) { return cp.d2U(x); };
    detail::append_piece(prof, {"cosh_left", -1.0 / k, 0.0, U, dU, d2U}, options.samples, 1.0, false);
    detail::append_piece(prof, {"cosh", 0.0, xt, U, dU, d2U}, options.samples, 1.0, true);

    // k int_{-1/k}^{x~} U^m, split at the minimum.
    auto integrand = [&](double x) { return std::exp(std::log(k) + m * (log_kinv2 + detail::log_cosh(cp.c * x))); };
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double integral = GK::integrate(integrand, -1.0 / k, 0.0, 15, 1e-13) + GK::integrate(integrand, 0.0, xt, 15, 1e-13);
    const double bound = m > 1.0 ? 2.0 * std::log(2.0 * k * k) / std::sqrt(a1) * std::pow(k, 0.5 - 0.5 * std::sqrt(m))
                                 : 2.0 * std::log(4.0 * k * k) / std::sqrt(a1) * std::pow(k, -1.0 / 6.0);
    const double lo = 1.0 / k, hi = std::pow(k, -1.0 / 3.0);
    prof.conditions.push_back(detail::make_check("x_tilde_window", xt, hi, xt > lo && xt < hi,
                                                 fmt("need %.6g < x~ < %.6g", lo, hi)));
    prof.conditions.push_back(detail::make_check("integral", integral, 1.0, integral < 1.0, "quadrature of k U^m"));
    prof.conditions.push_back(
        detail::make_check("integral_bound", bound, 1.0, bound < 1.0, "closed-form estimate 2 x~ k U(x~)^m", true));
    if (m > 1.0) {
        const double slope = cp.dU(xt);
        prof.conditions.push_back(detail::make_check("slope", slope, std::log(k), slope >= std::log(k), "U'(x~) >= ln k"));
    } else {
        const double size = cp.U(xt);
        const double need = 2.0 * std::pow(k, -2.0 / 3.0);
        prof.conditions.push_back(
            detail::make_check("size", size, need, size >= need * (1.0 - 1e-12), "U(x~) >= 2 k^(-2/3)"));
    }

    const double a1k = a1 * k, root_a1k = std::sqrt(a1k);
    std::vector<Inequality> ineqs;
    ineqs.push_back({"cosh_identity", 1e-8, [a1k](const SampleView& s) {
                         return std::make_pair(-std::abs(s.d2 - a1k * s.U), a1k * s.U);
                     }});
    ineqs.push_back({"cosh_convexity", 1e-8, [a1k, root_a1k](const SampleView& s) {
                         return std::make_pair(s.d2 - root_a1k * std::abs(s.dU_stored), a1k * s.U);
                     }});
    prof.report = residual_scan(prof, ineqs);
    prof.report.checks = prof.conditions;
    const double u0 = cp.U(0.0);
    prof.report.checks.push_back(detail::make_check("origin", u0, 1.0 / (k * k), u0 == 1.0 / (k * k) && cp.dU(0.0) == 0.0,
                                                    "U(0) = k^-2, U'(0) = 0"));
    return prof;
}

// ---------------------------------------------------------------- integro-ODE barrier

namespace {

using OdeState = std::array<double, 3>;  // U, U', I

// Quintic Hermite interpolation on [x0, x1] from values and first two derivatives.
double hermite5(double t, double h, double f0, double d0, double s0, double f1, double d1, double s1) {
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const double h00 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
    const double h10 = t - 6 * t3 + 8 * t4 - 3 * t5;
    const double h20 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
    const double h01 = 10 * t3 - 15 * t4 + 6 * t5;
    const double h11 = -4 * t3 + 7 * t4 - 3 * t5;
    const double h21 = 0.5 * (t3 - 2 * t4 + t5);
    return h00 * f0 + h10 * h * d0 + h20 * h * h * s0 + h01 * f1 + h11 * h * d1 + h21 * h * h * s1;
}

struct OdeTrack {
    double a2, b2, k;
    std::vector<double> x;
    std::vector<OdeState> s;

    double second(const OdeState& q) const { return a2 * k * q[0] / (k * q[2] + b2); }
    double third(const OdeState& q) const {
        const double den = k * q[2] + b2;
        return a2 * k * q[1] / den - a2 * k * k * q[0] * q[0] / (den * den);
    }
    std::size_t interval(double t) const {
        if (t <= x.front()) return 0;
        if (t >= x.back()) return x.size() - 2;
        return static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), t) - x.begin()) - 1;
    }
    // which: 0 -> U, 1 -> U', 2 -> I
    double eval(double t, int which) const {
        const std::size_t i = interval(t);
        const double h = x[i + 1] - x[i];
        const double tau = (t - x[i]) / h;
        const OdeState& p = s[i];
        const OdeState& q = s[i + 1];
        switch (which) {
            case 0: return hermite5(tau, h, p[0], p[1], second(p), q[0], q[1], second(q));
            case 1: return hermite5(tau, h, p[1], second(p), third(p), q[1], second(q), third(q));
            default: return hermite5(tau, h, p[2], p[0], p[1], q[2], q[0], q[1]);
        }
    }
};

}  // namespace

BarrierProfile ode_barrier(double a2, double b2, double m, double k, const OdeBarrierOptions& options) {
    if (!(a2 > 0 && a2 <= 1) || !(b2 >= 1) || !(m >= 2) || !(k > 1))
        throw ConfigError("ode_barrier: need 0 < a2 <= 1, b2 >= 1, m >= 2, k > 1");
    namespace odeint = boost::numeric::odeint;
    auto track = std::make_shared<OdeTrack>();
    track->a2 = a2;
    track->b2 = b2;
    track->k = k;
    const double X = std::pow(k, -1.0 / 6.0);
    const double U0 = std::pow(k, -2.0 / 3.0);
    auto rhs = [&](const OdeState& q, OdeState& dq, double) {
        dq[0] = q[1];
        dq[1] = track->second(q);
        dq[2] = q[0];
    };
    const double atol = 1e-16 * U0 * X;
    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<OdeState>>(atol, options.rtol);
    OdeState q{U0, 0.0, 0.0};
    double t = 0.0;
    double dt = X * 1e-6;
    track->x.push_back(t);
    track->s.push_back(q);
    std::size_t attempts = 0;
    while (t < X) {
        if (++attempts > 10'000'000) throw NumericalError("ode_barrier: step budget exhausted");
        const bool last = t + dt >= X;
        double step = last ? X - t : dt;
        if (stepper.try_step(rhs, q, t, step) == odeint::success) {
            if (last) t = X;
            track->x.push_back(t);
            track->s.push_back(q);
        }
        dt = step;
    }

    BarrierProfile prof;
    prof.kind = BarrierKind::Ode;
    prof.params.a2 = a2;
    prof.params.b2 = b2;
    prof.params.k = k;
    prof.params.m4 = m;
    auto U = [track](double y) { return track->eval(y, 0); };
    auto dU = [track](double y) { return track->eval(y, 1); };
    auto d2U = [track](double y) {
        return track->second({track->eval(y, 0), track->eval(y, 1), track->eval(y, 2)});
    };
    detail::append_piece(prof, {"ode", 0.0, X, U, dU, d2U}, options.samples, 1.0, true);
    prof.breakpoints = {{"x_end", X}};

    double fi = 0.0, fi_at = 0.0, slack = INFINITY, slack_at = 0.0, ratio = 0.0;
    const double k18 = std::pow(k, 0.125);
    for (std::size_t i = 0; i < prof.size(); ++i) {
        const double y = prof.y[i];
        const double I = track->eval(y, 2);
        const double u2 = d2U(y);
        const double r = std::abs(prof.dU[i] - a2 * std::log1p(k * I / b2));
        if (r > fi) fi = r, fi_at = y;
        const double sl = u2 - k18 * prof.dU[i];
        if (sl < slack) slack = sl, slack_at = y;
        const double cap = a2 * k * prof.U[i] * std::pow((m - 1) * k * I + std::pow(b2, m - 1), -1.0 / (m - 1));
        ratio = std::max(ratio, u2 / cap);
    }
    const double end_slope = track->s.back()[1];
    prof.conditions.push_back(
        detail::make_check("first_integral", fi, 1e-6, fi <= 1e-6, fmt("sup |U' - a2 ln((kI+b2)/b2)| at y = %.6g", fi_at)));
    prof.conditions.push_back(detail::make_check("endpoint_slope", end_slope, a2 / 8 * std::log(k),
                                                 end_slope >= a2 / 8 * std::log(k), "U'(k^(-1/6)) >= (a2/8) ln k"));
    prof.conditions.push_back(detail::make_check("k18_slope", slack, 0.0, slack > 0.0,
                                                 fmt("min of U'' - k^(1/8) U' at y = %.6g", slack_at), true));
    prof.conditions.push_back(detail::make_check("power_bound", ratio, 1.0, ratio <= 1.0 + 1e-12,
                                                 "max of U'' / (a2 k U ((m-1) k I + b2^(m-1))^(-1/(m-1)))"));
    std::vector<Inequality> ineqs;
    ineqs.push_back({"ode_identity", 1e-6, [d2U](const SampleView& s) {
                         const double exact = d2U(s.y);
                         return std::make_pair(-std::abs(s.d2 - exact), std::abs(exact));
                     }});
    prof.report = residual_scan(prof, ineqs);
    prof.report.checks = prof.conditions;
    return prof;
}

}  // namespace fastreact
