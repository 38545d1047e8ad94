#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fastreact/barriers.hpp"

namespace fastreact::detail {

/// log(cosh z) and log(sinh |z|) without overflow.
double log_cosh(double z);
double log_sinh_abs(double z);

/// k^-2 cosh(c (y - y0)) and its first two derivatives, exact at y = y0.
struct CoshPiece {
    double k, c, y0;
    double U(double y) const;
    double dU(double y) const;
    double d2U(double y) const { return c * c * U(y); }
    /// U(y) - k^-2 computed without cancellation.
    double excess(double y) const;
};

/// Sample points on [lo, hi] with at least n_min points and local spacing
/// no larger than fraction / rate(y). Throws PreconditionError past max_points.
std::vector<double> march_samples(double lo, double hi, std::size_t n_min, const std::function<double(double)>& rate,
                                  double fraction = 0.005, std::size_t max_points = 4'000'000);

/// Log-derivative rate used for sampling: m3 |U'|/U + sqrt(|U''|/U).
double profile_rate(const ProfilePiece& piece, double m3, double y);

/// Appends a piece with its samples; the right end sample is kept only when last.
void append_piece(BarrierProfile& profile, ProfilePiece piece, std::size_t n_min, double m3, bool last);

/// Fills J and J_piece with rate * int U^m3 (Gauss-Legendre per sample
/// interval on the piece evaluators) and V = F(v_start, J).
void attach_v(BarrierProfile& profile, const VLaw& law);

/// Bisection on a sign change of f over [a, b] to relative width 1e-12.
/// Returns the end of the final bracket on which f >= 0, or nothing when the
/// bracket is not established.
std::optional<double> bisect_root(const std::function<double(double)>& f, double a, double b, double rel = 1e-12);

/// Check helper.
Check make_check(std::string name, double value, double threshold, bool pass, std::string detail = {},
                 bool informational = false);

/// Finite-difference weights (Fornberg) of derivative orders 0..2 at z.
void fd_weights(double z, const double* x, std::size_t n, double* w1, double* w2);

}  // namespace fastreact::detail
