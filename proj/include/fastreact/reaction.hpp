#pragma once

#include <utility>

namespace fastreact {

/// Pointwise reaction state: u, v and the accumulated J = k * int u^m3 dtau.
struct ReactionState {
    double u = 0.0;
    double v = 0.0;
    double J = 0.0;
};

/// Exact solution of dv/dJ = -v^m4 after an increment dJ.
/// m4 within 1e-12 of 1 uses the exponential branch. Throws DomainError on
/// negative arguments or m4 < 1.
double v_exact_update(double v, double dJ, double m4);

/// Exact solution of du/dt = -k v u with v frozen: u exp(-k v dt).
double u_exact_update(double u, double v, double k, double dt);

/// One reaction substep of length tau for du/dt = -k u v, dv/dt = -k u^m3 v^m4.
/// v is advanced first with dJ = k int u^m3 taken exactly along the
/// frozen-v profile u exp(-k v t) (the trapezoid rule to second order, and
/// bounded as k tau grows); u is then advanced with the substep average of v.
/// Second order in tau, order preserving (u up and v down in the inputs gives
/// the same in the outputs), nonnegative, and never increases u or v.
ReactionState reaction_substep(const ReactionState& s, double k, double m3, double m4, double tau);

struct PointOdeOptions {
    double rtol = 1e-10;
    double atol = 1e-16;
    std::size_t max_steps = 5'000'000;
};

/// Reference solution of the diffusion-free system by adaptive Dormand-Prince
/// integration. Throws NumericalError when the step budget is exhausted.
std::pair<double, double> point_ode_oracle(double u0, double v0, double k, double m3, double m4, double t,
                                           const PointOdeOptions& options = {});

}  // namespace fastreact
