#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fastreact/problem.hpp"
#include "fastreact/trajectory.hpp"

namespace fastreact {

enum class BarrierKind { Cosh, Ode, Traveling, Patched, EnlargedHeat, Global };
const char* kind_name(BarrierKind kind);

/// Construction parameters; entries that do not apply stay NaN.
struct BarrierParams {
    static constexpr double unset = std::numeric_limits<double>::quiet_NaN();
    double a1 = unset, gamma = unset, a2 = unset, b2 = unset, a3 = unset, b3 = unset, c3 = unset, s = unset;
    double k = unset, m3 = unset, m4 = unset;
};

/// A named scalar condition: value compared against threshold.
struct Check {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
    /// Reported but not counted by ResidualReport::all_pass.
    bool informational = false;
    std::string detail;
};

/// Worst signed residual of one inequality over a scan. Residuals are
/// oriented so that >= 0 means satisfied; pass iff min_residual >= -tol * scale
/// at every sample (the stored values are taken at the worst sample in
/// scaled terms).
struct InequalityResult {
    std::string name;
    double min_residual = std::numeric_limits<double>::infinity();
    double location = std::numeric_limits<double>::quiet_NaN();
    double scale = 0.0;
    double tolerance = 0.0;
    std::size_t samples = 0;
    bool pass = true;
};

struct ResidualReport {
    std::vector<InequalityResult> inequalities;
    std::vector<Check> checks;
    /// Samples where a derivative came from the piece evaluator (see differentiate).
    std::size_t substituted_derivatives = 0;
    bool all_pass() const;
    /// First failing item, or empty.
    std::string first_failure() const;
};

/// One smooth piece of a profile with analytic (or dense-output) evaluators.
struct ProfilePiece {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
    std::function<double(double)> U, dU, d2U;
};

/// Sampled one-dimensional barrier. Samples are strictly increasing; sample
/// ranges of consecutive pieces meet at breakpoints, and a sample sitting on
/// a breakpoint belongs to the piece on its right. J holds the accumulated
/// rate * int_0^y U^m3 used to build V (empty when no V is attached) and
/// J_piece the same integral restarted at the first sample of each piece.
struct BarrierProfile {
    BarrierKind kind = BarrierKind::Cosh;
    BarrierParams params;
    std::vector<double> y, U, dU, V, J, J_piece;
    std::vector<std::size_t> piece_begin;  // first sample index of each piece
    std::vector<ProfilePiece> pieces;
    std::vector<std::pair<std::string, double>> breakpoints;
    std::vector<Check> conditions;
    /// For patched profiles: index of the active input at each sample.
    std::vector<int> index_map;
    bool constructed = true;
    std::string failure;
    ResidualReport report;

    std::size_t size() const { return y.size(); }
    bool has_breakpoint(const std::string& name) const;
    double breakpoint(const std::string& name) const;
    const Check* condition(const std::string& name) const;
    /// Index of the piece that owns sample i.
    std::size_t piece_of(std::size_t i) const;
    /// Evaluate U (and U') through the piece evaluators at any y in range.
    double eval_U(double y) const;
    double eval_dU(double y) const;
};

// ---------------------------------------------------------------- scanning

/// Finite-difference derivatives that never straddle a breakpoint: fourth-order
/// stencils on the nearest samples of the same piece (five points for the
/// first derivative, six for the second), with weights for arbitrary spacing.
/// dJ differentiates J_piece. Where a stencil agrees with the piece evaluator
/// to within its own rounding bound (pieces far shorter than the profile's
/// length scale), the evaluator value is used instead; `substituted` counts those.
struct ProfileDerivatives {
    std::vector<double> d1, d2, dJ;
    std::size_t substituted = 0;
};
ProfileDerivatives differentiate(const BarrierProfile& profile);

/// Values available to an inequality at one sample.
struct SampleView {
    std::size_t index;
    std::size_t piece;
    double y, U, dU_stored, d1, d2, V, J, dJ;
};

struct Inequality {
    std::string name;
    double tolerance = 1e-8;
    /// Returns (residual, scale); residual >= -tolerance * scale passes.
    std::function<std::pair<double, double>(const SampleView&)> residual;
    /// Restrict to samples with y in [lo, hi].
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

/// Evaluates every inequality at every sample. Throws PreconditionError with
/// a resolution hint when a piece holds fewer than min_samples_per_piece samples.
ResidualReport residual_scan(const BarrierProfile& profile, const std::vector<Inequality>& inequalities,
                             std::size_t min_samples_per_piece = 32);

// ---------------------------------------------------------------- constructions

enum class CoshThreshold {
    /// U(x~) = k^(-1/(2 sqrt m)) for m > 1: consistent with the integral and slope estimates.
    Corrected,
    /// U(x~) = k^(-sqrt(m)/2) for m > 1, as literally displayed; kept for comparison scans.
    Literal,
};

struct CoshOptions {
    CoshThreshold threshold = CoshThreshold::Corrected;
    std::size_t samples = 4096;
};

/// U(x) = k^-2 cosh(sqrt(a1 k) x) on [-1/k, x~] evaluated in log space, with
/// conditions "x_tilde_window", "integral" (quadrature, relative 1e-12),
/// "integral_bound" (the closed-form estimate of the existence argument),
/// "slope" (m > 1: U'(x~) >= ln k) or "size" (m = 1: U(x~) >= 2 k^(-2/3)),
/// and the identity scans U'' = a1 k U and U'' >= sqrt(a1 k) |U'|.
BarrierProfile cosh_barrier(double a1, double m, double k, const CoshOptions& options = {});

/// Closed-form threshold point sqrt(a1 k) x~ = acosh(U(x~) k^2); used as a cross-check.
double cosh_threshold_closed_form(double a1, double m, double k, CoshThreshold rule = CoshThreshold::Corrected);

struct OdeBarrierOptions {
    double rtol = 1e-10;
    std::size_t samples = 2048;
};

/// Solution of U'' = a2 k U / (k I + b2), I' = U, U(0) = k^(-2/3), U'(0) = 0 on
/// [0, k^(-1/6)] by adaptive Dormand-Prince stepping, with conditions
/// "first_integral" (sup |U' - a2 ln((kI + b2)/b2)|), "endpoint_slope",
/// "k18_slope" (k^(1/8) U' < U'' at every sample; informational) and
/// "power_bound" (U'' <= a2 k U ((m-1) k I + b2^(m-1))^(-1/(m-1))).
BarrierProfile ode_barrier(double a2, double b2, double m, double k, const OdeBarrierOptions& options = {});

struct TravelingParams {
    double s = 0.1;
    double a3 = 1.0;
    double b3 = 2.0;
    double c3 = 2.0;
    double m3 = 2.0;
    double m4 = 1.0;
};

struct TravelingOptions {
    std::size_t samples_per_piece = 2048;
    double tolerance = 1e-8;
    CoshThreshold threshold = CoshThreshold::Corrected;
};

/// Lower bound of V1 used to choose gamma: b3 e^(-1/s) (m4 = 1) or
/// ((m4-1)/s + b3^(1-m4))^(-1/(m4-1)) (m4 > 1).
double traveling_v_lower_bound(const TravelingParams& p);

/// Piecewise traveling-frame supersolution (cosh piece, optional ODE piece,
/// quadratic cap) with V from the accumulated integral of U^m3 and a residual
/// scan of the four defining inequalities, the junction kinks and the
/// monotonicity pattern attached. Unbracketed root finds produce
/// constructed = false with the reason in `failure`. Throws ConfigError for
/// parameters outside their ranges.
BarrierProfile traveling_supersolution(const TravelingParams& p, double k, const TravelingOptions& options = {});

/// V built from U: V(y) = F(v_start, rate * int_0^y U^m3) with F the exact
/// m4-kernel.
struct VLaw {
    double v_start = 1.0;
    double rate = 1.0;
    double m3 = 1.0;
    double m4 = 1.0;
};

struct PatchInput {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
    std::function<double(double)> U, dU, d2U;
    /// Optional own V of the input; used for the switch-point comparison.
    std::function<double(double)> V;
};

struct PatchOptions {
    /// <= 0 selects half of the smallest boundary gap.
    double delta = 0.0;
    std::size_t samples_per_window = 2048;
    double continuity_tolerance = 1e-9;
};

/// Pointwise minimum of overlapping inputs with the index map of the active
/// input, continuity checks at switches, delta-gap checks at window
/// boundaries covered by another input, and V rebuilt from the patched U.
/// Failures are reported through `constructed`/`failure` and the checks.
BarrierProfile patch_min(const std::vector<PatchInput>& inputs, const VLaw& law, const PatchOptions& options = {});
/// The patched function of a profile as a single input.
PatchInput as_patch_input(const BarrierProfile& profile, std::string name = "profile");

// ---------------------------------------------------------------- thresholds

struct KScanEntry {
    double k = 0.0;
    bool pass = false;
    std::string note;
};

struct ThresholdScan {
    std::vector<KScanEntry> entries;
    std::optional<double> threshold;  // first k from which every later entry passes
};

/// Powers of ten from k_min to k_max inclusive.
std::vector<double> powers_of_ten(double k_min, double k_max);
ThresholdScan scan_threshold(const std::vector<double>& ks, const std::function<KScanEntry(double)>& probe);

// ---------------------------------------------------------------- space-time barriers

struct EnlargedHeatOptions {
    std::size_t time_levels = 101;
    double dt = 0.0;  // <= 0: the grid's monotone Crank-Nicolson limit
    std::size_t max_offset_multiples = 400;
};

/// Heat flow on the d-enlarged complement with reflected initial data,
/// Dirichlet data (extended trace + offset) on nodes with rho <= -d, and the
/// sandwich u_inf <= ubar_d <= u_inf + eps1 checked on the complement nodes.
struct EnlargedHeatBarrier {
    double d = 0.0;
    double eps1 = 0.0;
    double offset = 0.0;
    Trajectory ubar;
    Trajectory u_inf;
    Field extended_u0;
    /// min over complement nodes/times of ubar - u_inf and of u_inf + eps1 - ubar
    Check lower;
    Check upper;
    bool sandwich() const { return lower.pass && upper.pass; }
};
EnlargedHeatBarrier enlarged_heat_barrier(double d, double eps1, const ProblemSpec& spec,
                                          const EnlargedHeatOptions& options = {});

enum class BThreeRule {
    /// b3 = v_d / 2: keeps V(., 0) <= v0 and V3 >= V~2(1/k).
    Corrected,
    /// b3 = (v_d / 2)^(-1) as displayed.
    Literal,
};

struct GlobalOptions {
    std::size_t time_levels = 101;
    double tolerance = 1e-8;
    BThreeRule b3_rule = BThreeRule::Corrected;
    TravelingOptions traveling;
    EnlargedHeatOptions heat;
};

/// Space-time supersolution of the whole problem assembled from the
/// enlarged heat barrier, the traveling profile composed with the signed
/// distance and the constant inner piece.
struct GlobalBarrier {
    double d = 0.0, eps = 0.0, k = 0.0;
    double s = 0.0, v_d = 0.0, a3 = 0.0, b3 = 0.0, c3 = 0.0;
    Grid grid;
    std::vector<double> times;
    std::vector<Field> U;
    /// V with the exponent of the reaction term, k int U^m3 (the patching construction).
    std::vector<Field> V;
    /// V with k int U, as displayed in the final assembly.
    std::vector<Field> V_linear;
    /// Active piece per node and time: 1, 2 or 3 (0 where none is defined).
    std::vector<std::vector<unsigned char>> region;
    BarrierProfile traveling;
    EnlargedHeatBarrier heat;
    ResidualReport report;
    bool constructed = true;
    std::string failure;
};
GlobalBarrier assemble_global_supersolution(const ProblemSpec& spec, double d, double eps,
                                            const GlobalOptions& options = {});

// ---------------------------------------------------------------- export

/// CSV `y,U,dU,V` (V left empty when the profile has none).
void write_barrier_csv(const BarrierProfile& profile, const std::string& path);
/// JSON with kind, parameters, breakpoints, conditions and residual minima.
std::string barrier_report_json(const BarrierProfile& profile, int indent = 2);

}  // namespace fastreact
