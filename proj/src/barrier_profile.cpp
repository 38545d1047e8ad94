#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>
#include <json.hpp>

#include "barrier_detail.hpp"
#include "fastreact/error.hpp"
#include "fastreact/reaction.hpp"

namespace fastreact {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.69314718055994530942;
}  // namespace

const char* kind_name(BarrierKind kind) {
    switch (kind) {
        case BarrierKind::Cosh: return "cosh";
        case BarrierKind::Ode: return "ode";
        case BarrierKind::Traveling: return "traveling";
        case BarrierKind::Patched: return "patched";
        case BarrierKind::EnlargedHeat: return "enlarged-heat";
        case BarrierKind::Global: return "global";
    }
    return "unknown";
}

bool ResidualReport::all_pass() const {
    for (const auto& q : inequalities)
        if (!q.pass) return false;
    for (const auto& c : checks)
        if (!c.pass && !c.informational) return false;
    return true;
}

std::string ResidualReport::first_failure() const {
    for (const auto& c : checks)
        if (!c.pass && !c.informational) return c.name + (c.detail.empty() ? "" : " (" + c.detail + ")");
    for (const auto& q : inequalities) {
        if (!q.pass) {
            char buf[160];
            std::snprintf(buf, sizeof buf, " (residual %.6g at y = %.6g, scale %.3g)", q.min_residual, q.location,
                          q.scale);
            return q.name + buf;
        }
    }
    return {};
}

bool BarrierProfile::has_breakpoint(const std::string& name) const {
    return std::any_of(breakpoints.begin(), breakpoints.end(), [&](const auto& b) { return b.first == name; });
}

double BarrierProfile::breakpoint(const std::string& name) const {
    for (const auto& b : breakpoints)
        if (b.first == name) return b.second;
    throw PreconditionError("breakpoint '" + name + "' not present");
}

const Check* BarrierProfile::condition(const std::string& name) const {
    for (const auto& c : conditions)
        if (c.name == name) return &c;
    return nullptr;
}

std::size_t BarrierProfile::piece_of(std::size_t i) const {
    const auto it = std::upper_bound(piece_begin.begin(), piece_begin.end(), i);
    return static_cast<std::size_t>(it - piece_begin.begin()) - 1;
}

namespace {
const ProfilePiece& piece_at(const BarrierProfile& p, double y) {
    if (p.pieces.empty()) throw PreconditionError("profile has no pieces");
    if (y < p.pieces.front().lo || y > p.pieces.back().hi)
        throw PreconditionError("profile evaluated outside its range");
    for (std::size_t i = p.pieces.size(); i-- > 0;)
        if (y >= p.pieces[i].lo) return p.pieces[i];
    return p.pieces.front();
}
}  // namespace

double BarrierProfile::eval_U(double yy) const { return piece_at(*this, yy).U(yy); }
double BarrierProfile::eval_dU(double yy) const { return piece_at(*this, yy).dU(yy); }

// ---------------------------------------------------------------- detail

namespace detail {

double log_cosh(double z) {
    z = std::abs(z);
    if (z < 20.0) return std::log(std::cosh(z));
    return z - kLn2 + std::log1p(std::exp(-2.0 * z));
}

double log_sinh_abs(double z) {
    z = std::abs(z);
    if (z < 20.0) return std::log(std::sinh(z));
    return z - kLn2 + std::log1p(-std::exp(-2.0 * z));
}

double CoshPiece::U(double y) const {
    const double z = c * (y - y0);
    const double kinv2 = 1.0 / (k * k);
    if (std::abs(z) < 600.0) return kinv2 * std::cosh(z);
    return std::exp(std::log(kinv2) + log_cosh(z));
}

double CoshPiece::dU(double y) const {
    const double z = c * (y - y0);
    if (z == 0.0) return 0.0;
    const double kinv2 = 1.0 / (k * k);
    if (std::abs(z) < 600.0) return kinv2 * c * std::sinh(z);
    return std::copysign(std::exp(std::log(kinv2 * c) + log_sinh_abs(z)), z);
}

double CoshPiece::excess(double y) const {
    const double z = c * (y - y0);
    const double sh = std::sinh(0.5 * z);
    if (std::abs(z) < 600.0) return 2.0 * sh * sh / (k * k);
    return U(y);
}

std::vector<double> march_samples(double lo, double hi, std::size_t n_min, const std::function<double(double)>& rate,
                                  double fraction, std::size_t max_points) {
    if (!(hi > lo)) throw PreconditionError("march_samples: empty interval");
    const double hbase = (hi - lo) / static_cast<double>(std::max<std::size_t>(n_min, 2) - 1);
    std::vector<double> y{lo};
    double cur = lo;
    while (true) {
        const double r = rate(cur);
        double h = hbase;
        if (r > 0 && std::isfinite(r)) h = std::min(h, fraction / r);
        if (!(h > 0)) h = hbase;
        if (cur + 1.5 * h >= hi) {
            if (hi - cur > h) y.push_back(cur + 0.5 * (hi - cur));
            y.push_back(hi);
            break;
        }
        cur += h;
        if (cur <= y.back()) throw PreconditionError("march_samples: spacing below floating-point resolution");
        y.push_back(cur);
        if (y.size() > max_points)
            throw PreconditionError("march_samples: more than " + std::to_string(max_points) +
                                    " samples needed; the profile is too steep for the sampling budget");
    }
    return y;
}

double profile_rate(const ProfilePiece& piece, double m3, double y) {
    const double u = piece.U(y);
    if (!(u > 0)) return 0.0;
    return m3 * std::abs(piece.dU(y)) / u + std::sqrt(std::abs(piece.d2U(y)) / u);
}

void append_piece(BarrierProfile& profile, ProfilePiece piece, std::size_t n_min, double m3, bool last) {
    const auto ys = march_samples(piece.lo, piece.hi, n_min,
                                  [&](double yy) { return profile_rate(piece, m3, yy); });
    profile.piece_begin.push_back(profile.y.size());
    const std::size_t end = last ? ys.size() : ys.size() - 1;
    for (std::size_t i = 0; i < end; ++i) {
        profile.y.push_back(ys[i]);
        profile.U.push_back(piece.U(ys[i]));
        profile.dU.push_back(piece.dU(ys[i]));
    }
    profile.pieces.push_back(std::move(piece));
}

void attach_v(BarrierProfile& profile, const VLaw& law) {
    const std::size_t n = profile.size();
    profile.J.assign(n, 0.0);
    profile.J_piece.assign(n, 0.0);
    profile.V.assign(n, law.v_start);
    using Gauss = boost::math::quadrature::gauss<double, 10>;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto& piece = profile.pieces[profile.piece_of(i)];
        const double inc = law.rate * Gauss::integrate(
                                          [&](double yy) { return std::pow(std::max(piece.U(yy), 0.0), law.m3); },
                                          profile.y[i], profile.y[i + 1]);
        profile.J[i + 1] = profile.J[i] + inc;
        const bool new_piece = profile.piece_of(i + 1) != profile.piece_of(i);
        profile.J_piece[i + 1] = new_piece ? 0.0 : profile.J_piece[i] + inc;
    }
    for (std::size_t i = 0; i < n; ++i) profile.V[i] = v_exact_update(law.v_start, profile.J[i], law.m4);
}

std::optional<double> bisect_root(const std::function<double(double)>& f, double a, double b, double rel) {
    double fa = f(a), fb = f(b);
    if (!std::isfinite(fa) || !std::isfinite(fb)) return std::nullopt;
    if (fa >= 0 && fb >= 0) return std::nullopt;
    if (fa < 0 && fb < 0) return std::nullopt;
    bool increasing = fb >= 0;
    double lo = a, hi = b;
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (std::abs(hi - lo) <= rel * std::max(std::abs(lo), std::abs(hi))) break;
        const double fm = f(mid);
        if ((fm >= 0) == increasing)
            hi = mid;
        else
            lo = mid;
    }
    return increasing ? hi : lo;
}

Check make_check(std::string name, double value, double threshold, bool pass, std::string detail,
                 bool informational) {
    Check c;
    c.name = std::move(name);
    c.value = value;
    c.threshold = threshold;
    c.pass = pass;
    c.detail = std::move(detail);
    c.informational = informational;
    return c;
}

void fd_weights(double z, const double* x, std::size_t n, double* w1, double* w2) {
    // Fornberg's recursion for orders 0..2 on n points.
    constexpr int M = 2;
    std::array<std::array<double, 8>, M + 1> c{};
    double c1 = 1.0, c4 = x[0] - z;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const int mn = std::min<int>(static_cast<int>(i), M);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - z;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int m = mn; m >= 1; --m) c[m][i] = c1 * (m * c[m - 1][i - 1] - c5 * c[m][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (int m = mn; m >= 1; --m) c[m][j] = (c4 * c[m][j] - m * c[m - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (w1) w1[j] = c[1][j];
        if (w2) w2[j] = c[2][j];
    }
}

}  // namespace detail

// ---------------------------------------------------------------- scanning

ProfileDerivatives differentiate(const BarrierProfile& profile) {
    const std::size_t n = profile.size();
    ProfileDerivatives d;
    d.d1.assign(n, 0.0);
    d.d2.assign(n, 0.0);
    const bool with_j = profile.J_piece.size() == n;
    if (with_j) d.dJ.assign(n, 0.0);
    for (std::size_t p = 0; p < profile.piece_begin.size(); ++p) {
        const std::size_t b = profile.piece_begin[p];
        const std::size_t e = p + 1 < profile.piece_begin.size() ? profile.piece_begin[p + 1] : n;
        const std::size_t len = e - b;
        if (len < 3) continue;
        const ProfilePiece* pc = p < profile.pieces.size() ? &profile.pieces[p] : nullptr;
        const ProfilePiece piece = pc ? *pc : ProfilePiece{};
        // A stencil whose value matches the evaluator to within its own rounding
        // cannot resolve the derivative; the evaluator value is used there. The
        // rounding of each sample includes that of its argument, |y U'| eps.
        auto substitute = [&](double fd, double sum_abs, const std::function<double(double)>& exact, double y) {
            if (!exact) return fd;
            const double e = exact(y);
            constexpr double eps = std::numeric_limits<double>::epsilon();
            if (std::abs(fd - e) <= 8.0 * eps * sum_abs + 4.0 * eps * std::abs(e)) {
                ++d.substituted;
                return e;
            }
            return fd;
        };
        const bool with_du = profile.dU.size() == profile.size();
        auto sample_noise = [&](std::size_t j) {
            return std::abs(profile.U[j]) + (with_du ? std::abs(profile.y[j] * profile.dU[j]) : 0.0);
        };
        for (std::size_t i = b; i < e; ++i) {
            // Stencil of s points from the same piece, as centred as the piece allows.
            auto stencil = [&](std::size_t s, std::size_t& start) {
                s = std::min(s, len);
                const std::size_t left = s / 2;
                start = i >= b + left ? i - left : b;
                if (start + s > e) start = e - s;
                return s;
            };
            std::array<double, 8> x{}, w1{}, w2{};
            std::size_t start = 0;
            std::size_t s = stencil(5, start);
            for (std::size_t j = 0; j < s; ++j) x[j] = profile.y[start + j] - profile.y[i];
            detail::fd_weights(0.0, x.data(), s, w1.data(), nullptr);
            double a = 0.0, aj = 0.0, noise = 0.0;
            for (std::size_t j = 0; j < s; ++j) {
                a += w1[j] * profile.U[start + j];
                noise += std::abs(w1[j]) * sample_noise(start + j);
                if (with_j) aj += w1[j] * profile.J_piece[start + j];
            }
            d.d1[i] = substitute(a, noise, piece.dU, profile.y[i]);
            if (with_j) d.dJ[i] = aj;

            s = stencil(6, start);
            for (std::size_t j = 0; j < s; ++j) x[j] = profile.y[start + j] - profile.y[i];
            detail::fd_weights(0.0, x.data(), s, nullptr, w2.data());
            double c = 0.0;
            noise = 0.0;
            for (std::size_t j = 0; j < s; ++j) {
                c += w2[j] * profile.U[start + j];
                noise += std::abs(w2[j]) * sample_noise(start + j);
            }
            d.d2[i] = substitute(c, noise, piece.d2U, profile.y[i]);
        }
    }
    return d;
}

ResidualReport residual_scan(const BarrierProfile& profile, const std::vector<Inequality>& inequalities,
                             std::size_t min_samples_per_piece) {
    const std::size_t n = profile.size();
    for (std::size_t p = 0; p < profile.piece_begin.size(); ++p) {
        const std::size_t b = profile.piece_begin[p];
        const std::size_t e = p + 1 < profile.piece_begin.size() ? profile.piece_begin[p + 1] : n;
        if (e - b < min_samples_per_piece)
            throw PreconditionError("residual_scan: piece '" + profile.pieces[p].name + "' holds " +
                                    std::to_string(e - b) + " samples, fewer than " +
                                    std::to_string(min_samples_per_piece) +
                                    "; resample with more points per piece");
    }
    const ProfileDerivatives d = differentiate(profile);
    const bool with_v = profile.V.size() == n;
    const bool with_j = profile.J.size() == n;
    ResidualReport report;
    report.substituted_derivatives = d.substituted;
    for (const auto& q : inequalities) {
        InequalityResult r;
        r.name = q.name;
        r.tolerance = q.tolerance;
        double worst = kInf;
        for (std::size_t i = 0; i < n; ++i) {
            if (profile.y[i] < q.lo || profile.y[i] > q.hi) continue;
            SampleView v{i,
                         profile.piece_of(i),
                         profile.y[i],
                         profile.U[i],
                         profile.dU[i],
                         d.d1[i],
                         d.d2[i],
                         with_v ? profile.V[i] : 0.0,
                         with_j ? profile.J[i] : 0.0,
                         with_j ? d.dJ[i] : 0.0};
            const auto [res, scale] = q.residual(v);
            ++r.samples;
            const bool ok = res >= -q.tolerance * scale;
            if (!ok) r.pass = false;
            const double normalized = scale > 0 ? res / scale : res;
            if (normalized < worst) {
                worst = normalized;
                r.min_residual = res;
                r.location = profile.y[i];
                r.scale = scale;
            }
        }
        report.inequalities.push_back(std::move(r));
    }
    return report;
}

// ---------------------------------------------------------------- thresholds

std::vector<double> powers_of_ten(double k_min, double k_max) {
    if (!(k_min > 0) || !(k_max >= k_min)) throw ConfigError("powers_of_ten: need 0 < k_min <= k_max");
    const int a = static_cast<int>(std::ceil(std::log10(k_min) - 1e-9));
    const int b = static_cast<int>(std::floor(std::log10(k_max) + 1e-9));
    std::vector<double> ks;
    for (int e = a; e <= b; ++e) ks.push_back(std::stod("1e" + std::to_string(e)));
    return ks;
}

ThresholdScan scan_threshold(const std::vector<double>& ks, const std::function<KScanEntry(double)>& probe) {
    ThresholdScan scan;
    for (double k : ks) scan.entries.push_back(probe(k));
    for (std::size_t i = scan.entries.size(); i-- > 0;) {
        if (!scan.entries[i].pass) break;
        scan.threshold = scan.entries[i].k;
    }
    return scan;
}

// ---------------------------------------------------------------- export

void write_barrier_csv(const BarrierProfile& profile, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw ConfigError("cannot open '" + path + "' for writing");
    std::fprintf(f, "y,U,dU,V\n");
    const bool with_v = profile.V.size() == profile.size();
    for (std::size_t i = 0; i < profile.size(); ++i) {
        if (with_v)
            std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", profile.y[i], profile.U[i], profile.dU[i], profile.V[i]);
        else
            std::fprintf(f, "%.17g,%.17g,%.17g,\n", profile.y[i], profile.U[i], profile.dU[i]);
    }
    std::fclose(f);
}

namespace {
nlohmann::json check_json(const Check& c) {
    return {{"name", c.name},
            {"value", c.value},
            {"threshold", c.threshold},
            {"pass", c.pass},
            {"informational", c.informational},
            {"detail", c.detail}};
}
}  // namespace

std::string barrier_report_json(const BarrierProfile& profile, int indent) {
    using nlohmann::json;
    const auto& p = profile.params;
    json params = json::object();
    const std::pair<const char*, double> named[] = {{"a1", p.a1}, {"gamma", p.gamma}, {"a2", p.a2}, {"b2", p.b2},
                                                    {"a3", p.a3}, {"b3", p.b3},       {"c3", p.c3}, {"s", p.s},
                                                    {"k", p.k},   {"m3", p.m3},       {"m4", p.m4}};
    for (const auto& [name, value] : named)
        if (!std::isnan(value)) params[name] = value;
    json out;
    out["kind"] = kind_name(profile.kind);
    out["constructed"] = profile.constructed;
    if (!profile.failure.empty()) out["failure"] = profile.failure;
    out["parameters"] = params;
    out["samples"] = profile.size();
    json bps = json::object();
    for (const auto& [name, value] : profile.breakpoints) bps[name] = value;
    out["breakpoints"] = bps;
    json pieces = json::array();
    for (const auto& piece : profile.pieces) pieces.push_back({{"name", piece.name}, {"lo", piece.lo}, {"hi", piece.hi}});
    out["pieces"] = pieces;
    json conds = json::array();
    for (const auto& c : profile.conditions) conds.push_back(check_json(c));
    out["conditions"] = conds;
    json ineqs = json::array();
    for (const auto& q : profile.report.inequalities)
        ineqs.push_back({{"name", q.name},
                         {"min_residual", q.min_residual},
                         {"location", q.location},
                         {"scale", q.scale},
                         {"tolerance", q.tolerance},
                         {"samples", q.samples},
                         {"pass", q.pass}});
    out["inequalities"] = ineqs;
    json checks = json::array();
    for (const auto& c : profile.report.checks) checks.push_back(check_json(c));
    out["checks"] = checks;
    out["all_pass"] = profile.constructed && profile.report.all_pass();
    return out.dump(indent);
}

}  // namespace fastreact
