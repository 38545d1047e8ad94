#include "fastreact/reaction.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "fastreact/error.hpp"

namespace fastreact {

double v_exact_update(double v, double dJ, double m4) {
    if (!(v >= 0) || !(dJ >= 0) || !(m4 >= 1))
        throw DomainError("v_exact_update: need v >= 0, dJ >= 0, m4 >= 1");
    if (v == 0.0 || dJ == 0.0) return v;
    if (m4 - 1.0 <= 1e-12) return v * std::exp(-dJ);
    // (v^{1-m4} + (m4-1) dJ)^{-1/(m4-1)} written as v (1 + z)^{-1/e} to keep
    // precision when z = e dJ v^e is small.
    const double e = m4 - 1.0;
    const double z = e * dJ * std::pow(v, e);
    return v * std::exp(-std::log1p(z) / e);
}

double u_exact_update(double u, double v, double k, double dt) {
    if (!(u >= 0) || !(v >= 0) || !(k >= 0) || !(dt >= 0))
        throw DomainError("u_exact_update: arguments must be nonnegative");
    return u * std::exp(-k * v * dt);
}

ReactionState reaction_substep(const ReactionState& s, double k, double m3, double m4, double tau) {
    if (s.u == 0.0 || s.v == 0.0) return s;
    // dJ = k int_0^tau (u exp(-k v t))^m3 dt, exact for v frozen at its start value.
    const double z = m3 * k * s.v * tau;
    const double phi = z < 1e-8 ? 1.0 - 0.5 * z : -std::expm1(-z) / z;
    const double dJ = k * tau * std::pow(s.u, m3) * phi;
    const double v1 = v_exact_update(s.v, dJ, m4);
    const double u1 = u_exact_update(s.u, 0.5 * (s.v + v1), k, tau);
    return {u1, v1, s.J + dJ};
}

std::pair<double, double> point_ode_oracle(double u0, double v0, double k, double m3, double m4, double t,
                                           const PointOdeOptions& options) {
    if (!(u0 >= 0) || !(v0 >= 0) || !(k >= 0) || !(t >= 0))
        throw DomainError("point_ode_oracle: arguments must be nonnegative");
    if (u0 == 0.0 || v0 == 0.0 || k == 0.0 || t == 0.0) return {u0, v0};

    using State = std::array<double, 2>;
    namespace odeint = boost::numeric::odeint;
    auto rhs = [&](const State& x, State& dxdt, double) {
        const double u = std::max(x[0], 0.0);
        const double v = std::max(x[1], 0.0);
        dxdt[0] = -k * u * v;
        dxdt[1] = -k * std::pow(u, m3) * std::pow(v, m4);
    };
    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(options.atol, options.rtol);
    State x{u0, v0};
    double tt = 0.0;
    double dt = std::min(t, 1e-3 / (1.0 + k * std::max(u0, v0)));
    std::size_t attempts = 0;
    while (tt < t) {
        if (++attempts > options.max_steps)
            throw NumericalError("point_ode_oracle: step budget of " + std::to_string(options.max_steps) +
                                 " exhausted at t = " + std::to_string(tt));
        const bool last = tt + dt >= t;
        double step = last ? t - tt : dt;
        if (stepper.try_step(rhs, x, tt, step) == odeint::success && last) tt = t;
        dt = step;
    }
    return {std::max(x[0], 0.0), std::max(x[1], 0.0)};
}

}  // namespace fastreact
