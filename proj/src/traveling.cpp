#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <string>

#include "barrier_detail.hpp"
#include "fastreact/error.hpp"
#include "fastreact/reaction.hpp"

namespace fastreact {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[240];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

BarrierProfile failed(BarrierProfile prof, std::string why) {
    prof.constructed = false;
    prof.failure = std::move(why);
    prof.report.checks = prof.conditions;
    prof.report.checks.push_back(detail::make_check("constructed", 0.0, 1.0, false, prof.failure));
    return prof;
}

// Slope jump U'(b+) - U'(b-) at a junction; <= 0 keeps -U'' a nonnegative measure there.
void junction_checks(BarrierProfile& prof, const std::string& name, const ProfilePiece& left,
                     const ProfilePiece& right, double b) {
    const double ul = left.U(b), ur = right.U(b);
    const double jump_u = std::abs(ur - ul);
    const double tol = 1e-9 * std::max(std::abs(ul), std::abs(ur));
    prof.report.checks.push_back(detail::make_check("continuity_" + name, jump_u, tol, jump_u <= tol,
                                                    fmt("U(b-) = %.9g, U(b+) = %.9g", ul, ur)));
    const double sl = left.dU(b), sr = right.dU(b);
    prof.report.checks.push_back(detail::make_check(
        "kink_" + name, sr - sl, 0.0, sr - sl <= 0.0,
        fmt("U'(b-) = %.9g, U'(b+) = %.9g; a convex kink violates the U inequality", sl, sr)));
}

}  // namespace

double traveling_v_lower_bound(const TravelingParams& p) {
    if (p.m4 == 1.0) return p.b3 * std::exp(-1.0 / p.s);
    const double e = p.m4 - 1.0;
    return std::pow(e / p.s + std::pow(p.b3, -e), -1.0 / e);
}

BarrierProfile traveling_supersolution(const TravelingParams& p, double k, const TravelingOptions& options) {
    if (!(p.s > 0 && p.s < 0.5)) throw ConfigError("traveling_supersolution: need 0 < s < 1/2");
    if (!(p.a3 > 0 && p.b3 > 0 && p.c3 > 0)) throw ConfigError("traveling_supersolution: a3, b3, c3 must be positive");
    if (!(p.m3 >= 1 && p.m4 >= 1)) throw ConfigError("traveling_supersolution: m3, m4 must be >= 1");
    if (!(p.m3 > 1 || p.m4 >= 2)) throw ConfigError("traveling_supersolution: need m3 > 1 or m4 >= 2");
    if (!(k > 1)) throw ConfigError("traveling_supersolution: need k > 1");
    const double gamma = 0.5 * traveling_v_lower_bound(p);
    if (!(gamma > 0)) throw ConfigError("traveling_supersolution: gamma <= 0 (lower bound of V underflows)");

    BarrierProfile prof;
    prof.kind = BarrierKind::Traveling;
    prof.params.gamma = gamma;
    prof.params.a1 = gamma;
    prof.params.a3 = p.a3;
    prof.params.b3 = p.b3;
    prof.params.c3 = p.c3;
    prof.params.s = p.s;
    prof.params.k = k;
    prof.params.m3 = p.m3;
    prof.params.m4 = p.m4;
    const double lk = std::log(k);
    const double kinv = 1.0 / k;

    CoshOptions co;
    co.threshold = options.threshold;
    co.samples = 256;
    const BarrierProfile lemma = cosh_barrier(gamma, p.m3, k, co);
    for (auto c : lemma.conditions) {
        c.name = "lemma_" + c.name;
        c.informational = true;
        prof.conditions.push_back(c);
    }
    if (!lemma.constructed) return failed(std::move(prof), "cosh piece: " + lemma.failure);
    const double y1 = lemma.breakpoint("x_tilde") + kinv;
    const detail::CoshPiece U1{k, std::sqrt(gamma * k), kinv};
    auto cU = [U1](double y) { return U1.U(y); };
    auto cdU = [U1](double y) { return U1.dU(y); };
    auto cd2U = [U1](double y) { return U1.d2U(y); };

    // Quadratic cap q(z) = -(ln k)^(3/4) z^2 + 4 (ln k)^(1/2) z.
    const double qa = std::pow(lk, 0.75), qb = 4.0 * std::sqrt(lk);
    const double cap_len = std::pow(lk, -0.25);
    auto quadratic = [qa, qb](double y0, double base) {
        ProfilePiece q;
        q.name = "quadratic";
        q.U = [=](double y) { const double z = y - y0; return base + z * (qb - qa * z); };
        q.dU = [=](double y) { return qb - 2.0 * qa * (y - y0); };
        q.d2U = [=](double) { return -2.0 * qa; };
        return q;
    };

    std::vector<ProfilePiece> pieces;
    pieces.push_back({"cosh_left", 0.0, kinv, cU, cdU, cd2U});
    std::vector<std::pair<std::string, double>> junctions;
    double yhat = 0.0;
    prof.breakpoints.push_back({"k_inv", kinv});
    prof.breakpoints.push_back({"y1", y1});

    if (p.m3 > 1.0) {
        const auto y2 = detail::bisect_root([&](double y) { return U1.dU(y) - 0.5 * lk; }, kinv, y1);
        if (!y2) return failed(std::move(prof), fmt("y2 not bracketed: U1'(y1) = %.6g < (ln k)/2 = %.6g", U1.dU(y1), 0.5 * lk));
        yhat = *y2 + cap_len;
        pieces.push_back({"cosh", kinv, *y2, cU, cdU, cd2U});
        ProfilePiece q = quadratic(*y2, U1.U(*y2));
        q.lo = *y2;
        q.hi = yhat;
        pieces.push_back(q);
        prof.breakpoints.push_back({"y2", *y2});
        junctions.push_back({"y2", *y2});
    } else {
        const double e = p.m4 - 1.0;
        const double a2 = 0.5 * std::pow(p.s, 1.0 / e);
        const double b2 = std::pow(e / p.s + std::pow(p.b3, -e), 1.0 / e);
        prof.params.a2 = a2;
        prof.params.b2 = b2;
        OdeBarrierOptions oo;
        oo.samples = 256;
        const BarrierProfile ode = ode_barrier(a2, b2, p.m4, k, oo);
        for (auto c : ode.conditions) {
            c.name = "ode_" + c.name;
            c.informational = true;
            prof.conditions.push_back(c);
        }
        const ProfilePiece U3 = ode.pieces.front();
        const double X = U3.hi;
        const double u3_0 = std::pow(k, -2.0 / 3.0);
        const auto y3 = detail::bisect_root([&](double y) { return U1.U(y) - u3_0; }, kinv, y1);
        if (!y3) return failed(std::move(prof), "y3 not bracketed: U1 does not reach k^(-2/3) on [1/k, y1]");
        const double y5 = 0.5 * kinv;
        const double target = U3.U(y5);
        // U3(y5) exceeds k^(-2/3) by far less than rounding, so y4 lands on y3 in double.
        const auto y4 = detail::bisect_root([&](double y) { return U1.U(y) - target; }, kinv, y1);
        if (!y4) return failed(std::move(prof), "y4 not bracketed on [1/k, y1]");
        const double y4v = *y4;
        // Shifted ODE piece U3(y - y4 + y5), evaluated in the local coordinate to keep y5 visible.
        ProfilePiece u3s;
        u3s.name = "ode";
        u3s.U = [U3, y4v, y5](double y) { return U3.U((y - y4v) + y5); };
        u3s.dU = [U3, y4v, y5](double y) { return U3.dU((y - y4v) + y5); };
        u3s.d2U = [U3, y4v, y5](double y) { return U3.d2U((y - y4v) + y5); };
        const double yend = y4v + (X - y5);
        const double slope_target = a2 / 16.0 * lk;
        const auto y6 = detail::bisect_root([&](double y) { return u3s.dU(y) - slope_target; }, y4v, yend);
        if (!y6) return failed(std::move(prof), fmt("y6 not bracketed: shifted ODE slope stays below (a2/16) ln k = %.6g", slope_target));
        yhat = *y6 + cap_len;
        pieces.push_back({"cosh", kinv, y4v, cU, cdU, cd2U});
        u3s.lo = y4v;
        u3s.hi = *y6;
        pieces.push_back(u3s);
        ProfilePiece q = quadratic(*y6, u3s.U(*y6));
        q.lo = *y6;
        q.hi = yhat;
        pieces.push_back(q);
        prof.breakpoints.push_back({"y3", *y3});
        prof.breakpoints.push_back({"y4", y4v});
        prof.breakpoints.push_back({"y5", y5});
        prof.breakpoints.push_back({"y6", *y6});
        junctions.push_back({"y4", y4v});
        junctions.push_back({"y6", *y6});
    }
    prof.breakpoints.push_back({"y_hat", yhat});

    for (std::size_t i = 0; i < pieces.size(); ++i)
        detail::append_piece(prof, pieces[i], options.samples_per_piece, p.m3, i + 1 == pieces.size());
    const VLaw law{p.b3, k / p.s, p.m3, p.m4};
    detail::attach_v(prof, law);

    const double a3 = p.a3, s = p.s, m3 = p.m3;
    std::vector<Inequality> ineqs;
    ineqs.push_back({"mo1", options.tolerance, [a3, k](const SampleView& v) {
                         const double kuv = k * v.U * v.V;
                         return std::make_pair(-a3 * std::abs(v.d1) - v.d2 + kuv,
                                               a3 * std::abs(v.d1) + std::abs(v.d2) + kuv);
                     }});
    ineqs.push_back({"mo2", options.tolerance, [s, k, m3](const SampleView& v) {
                         const double react = k * std::pow(v.U, m3);
                         return std::make_pair(s * v.dJ - react, react);
                     }});
    prof.report = residual_scan(prof, ineqs);
    prof.report.checks = prof.conditions;

    for (const auto& [name, b] : junctions) {
        std::size_t right = 0;
        while (right + 1 < prof.pieces.size() && prof.pieces[right].lo < b) ++right;
        junction_checks(prof, name, prof.pieces[right - 1], prof.pieces[right], b);
    }
    if (p.m3 == 1.0) {
        // V1(y4) > V3(y5), with V3 the ODE piece's own V.
        const double e = p.m4 - 1.0;
        const double y4 = prof.breakpoint("y4"), y5 = prof.breakpoint("y5");
        std::size_t i4 = static_cast<std::size_t>(std::lower_bound(prof.y.begin(), prof.y.end(), y4) - prof.y.begin());
        const double v1 = prof.V[i4];
        const double I5 = prof.U[i4] * y5;  // int_0^y5 U3 with U3 within rounding of k^(-2/3) there
        const double v3 = std::pow(p.s, 1.0 / e) * std::pow(e * k * I5 + e / p.s + std::pow(p.b3, -e), -1.0 / e);
        prof.report.checks.push_back(detail::make_check("v_order_y4", v1, v3, v1 > v3, "V1(y4) > V3(y5)"));
    }

    // mo3: U(1/k) = k^-2 and U'(1/k) = 0 exactly, U(0) > k^-2, V(0) = b3.
    const std::size_t ik = prof.piece_begin[1];
    const bool mo3 = prof.U[ik] == 1.0 / (k * k) && prof.dU[ik] == 0.0 && U1.excess(0.0) > 0.0 && prof.V[0] == p.b3;
    prof.report.checks.push_back(detail::make_check(
        "mo3", prof.U[ik], 1.0 / (k * k), mo3,
        fmt("U(1/k) - k^-2 = %.3g, U'(1/k) = %.3g, U(0) - k^-2 = %.3g", prof.U[ik] - 1.0 / (k * k), prof.dU[ik],
            U1.excess(0.0))));
    const double u_hat = prof.U.back();
    prof.report.checks.push_back(detail::make_check("mo4", u_hat, p.c3, u_hat > p.c3, "U(y_hat) > c3"));
    const double cap_floor = 3.0 * std::pow(lk, 0.25);
    prof.report.checks.push_back(detail::make_check("cap_value", u_hat, cap_floor, u_hat >= cap_floor * (1.0 - 1e-12),
                                                    "U(y_hat) >= 3 (ln k)^(1/4)"));
    prof.report.checks.push_back(detail::make_check("y_hat_bound", yhat, 2.0 * cap_len, yhat < 2.0 * cap_len,
                                                    "y_hat < 2 (ln k)^(-1/4)"));
    std::size_t bad = 0;
    double bad_at = 0.0;
    for (std::size_t i = 0; i < prof.size(); ++i) {
        const double y = prof.y[i];
        const bool ok = y == 0.0 || (y < kinv ? prof.dU[i] < 0.0 : y > kinv ? prof.dU[i] > 0.0 : prof.dU[i] == 0.0);
        if (!ok && bad++ == 0) bad_at = y;
    }
    prof.report.checks.push_back(detail::make_check("monotone", static_cast<double>(bad), 0.0, bad == 0,
                                                    bad ? fmt("first sign violation at y = %.9g", bad_at)
                                                        : "U' < 0 on (0, 1/k), U' > 0 on (1/k, y_hat]"));
    double vmin_step = 0.0;
    for (std::size_t i = 1; i < prof.size(); ++i) vmin_step = std::max(vmin_step, prof.V[i] - prof.V[i - 1]);
    prof.report.checks.push_back(
        detail::make_check("v_nonincreasing", vmin_step, 0.0, vmin_step <= 0.0, "largest increase of V between samples"));
    return prof;
}

// ---------------------------------------------------------------- patching

PatchInput as_patch_input(const BarrierProfile& profile, std::string name) {
    if (profile.pieces.empty()) throw PreconditionError("as_patch_input: profile has no pieces");
    auto pieces = std::make_shared<std::vector<ProfilePiece>>(profile.pieces);
    auto at = [pieces](double y) -> const ProfilePiece& {
        for (std::size_t i = pieces->size(); i-- > 0;)
            if (y >= (*pieces)[i].lo) return (*pieces)[i];
        return pieces->front();
    };
    PatchInput in;
    in.name = std::move(name);
    in.lo = pieces->front().lo;
    in.hi = pieces->back().hi;
    in.U = [at](double y) { return at(y).U(y); };
    in.dU = [at](double y) { return at(y).dU(y); };
    in.d2U = [at](double y) { return at(y).d2U(y); };
    return in;
}

BarrierProfile patch_min(const std::vector<PatchInput>& inputs, const VLaw& law, const PatchOptions& options) {
    if (inputs.empty()) throw ConfigError("patch_min: no inputs");
    for (const auto& in : inputs)
        if (!(in.hi > in.lo) || !in.U || !in.dU || !in.d2U) throw ConfigError("patch_min: input '" + in.name + "' is malformed");
    // Windows must chain into one interval.
    std::vector<std::size_t> order(inputs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return inputs[a].lo < inputs[b].lo; });
    double reach = inputs[order[0]].hi;
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (!(inputs[order[i]].lo < reach)) throw ConfigError("patch_min: windows do not overlap");
        reach = std::max(reach, inputs[order[i]].hi);
    }
    const double lo = inputs[order[0]].lo, hi = reach;

    auto contains = [&](std::size_t i, double y) { return y >= inputs[i].lo && y <= inputs[i].hi; };
    auto active = [&](double y) {
        std::size_t best = inputs.size();
        double bu = kInf;
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            if (!contains(i, y)) continue;
            const double u = inputs[i].U(y);
            if (u < bu) bu = u, best = i;
        }
        return best;
    };

    std::vector<double> cand;
    for (const auto& in : inputs) {
        const ProfilePiece piece{in.name, in.lo, in.hi, in.U, in.dU, in.d2U};
        const auto ys = detail::march_samples(in.lo, in.hi, options.samples_per_window,
                                              [&](double y) { return detail::profile_rate(piece, law.m3, y); }, 0.01);
        cand.insert(cand.end(), ys.begin(), ys.end());
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    BarrierProfile prof;
    prof.kind = BarrierKind::Patched;
    prof.params.m3 = law.m3;
    prof.params.m4 = law.m4;
    std::vector<Check> checks;
    // Runs of constant active index with their switch points.
    struct Run {
        std::size_t input;
        double a, b;
    };
    std::vector<Run> runs;
    std::size_t cur = active(cand.front());
    double start = cand.front();
    int switch_no = 0;
    for (std::size_t c = 1; c < cand.size(); ++c) {
        const std::size_t nxt = active(cand[c]);
        if (nxt == cur) continue;
        const double ya = cand[c - 1], yb = cand[c];
        double ys;
        if (contains(cur, yb) && contains(nxt, ya)) {
            const auto root = detail::bisect_root(
                [&](double y) { return inputs[cur].U(y) - inputs[nxt].U(y); }, ya, yb);
            ys = root.value_or(yb);
        } else {
            ys = contains(cur, yb) ? inputs[nxt].lo : inputs[cur].hi;
        }
        const double ul = inputs[cur].U(ys), ur = inputs[nxt].U(ys);
        const double jump = std::abs(ul - ur);
        const double tol = options.continuity_tolerance * std::max(1.0, std::max(std::abs(ul), std::abs(ur)));
        const std::string tag = "switch_" + std::to_string(++switch_no);
        checks.push_back(detail::make_check("continuity_" + tag, jump, tol, jump <= tol,
                                            inputs[cur].name + " -> " + inputs[nxt].name + fmt(" at y = %.12g", ys)));
        prof.breakpoints.push_back({tag, ys});
        runs.push_back({cur, start, ys});
        start = ys;
        cur = nxt;
    }
    runs.push_back({cur, start, hi});

    for (std::size_t r = 0; r < runs.size(); ++r) {
        const auto& in = inputs[runs[r].input];
        if (!(runs[r].b > runs[r].a)) continue;
        const std::size_t first = prof.size();
        detail::append_piece(prof, {in.name, runs[r].a, runs[r].b, in.U, in.dU, in.d2U},
                             std::max<std::size_t>(32, options.samples_per_window / 4), law.m3, r + 1 == runs.size());
        prof.index_map.resize(prof.size(), static_cast<int>(runs[r].input) + 1);
        (void)first;
    }

    // Gap at window boundaries lying inside the patched interval.
    double min_gap = kInf, min_gap_at = 0.0;
    std::vector<std::pair<double, double>> gaps;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        for (double b : {inputs[i].lo, inputs[i].hi}) {
            if (b <= lo || b >= hi) continue;
            const std::size_t l = active(b);
            double others = kInf;
            for (std::size_t j = 0; j < inputs.size(); ++j)
                if (j != l && contains(j, b)) others = std::min(others, inputs[j].U(b));
            const double gap = l == i ? -kInf : others - inputs[l].U(b);
            gaps.push_back({b, gap});
            if (gap < min_gap) min_gap = gap, min_gap_at = b;
        }
    }
    if (!gaps.empty()) {
        const double delta = options.delta > 0 ? options.delta : 0.5 * min_gap;
        const bool ok = delta > 0 && min_gap > delta;
        checks.push_back(detail::make_check(
            "delta_gap", min_gap, delta, ok,
            ok ? fmt("delta = %.6g", delta) : fmt("gap %.6g at window boundary y = %.12g", min_gap, min_gap_at)));
    }

    detail::attach_v(prof, law);
    for (std::size_t r = 1; r < runs.size(); ++r) {
        const auto& in = inputs[runs[r].input];
        if (!in.V) continue;
        const double ys = runs[r].a;
        const std::size_t i = static_cast<std::size_t>(std::lower_bound(prof.y.begin(), prof.y.end(), ys) - prof.y.begin());
        if (i >= prof.size()) continue;
        const double own = in.V(ys);
        checks.push_back(detail::make_check("v_switch_" + std::to_string(r), prof.V[i], own,
                                            prof.V[i] >= own - options.continuity_tolerance,
                                            "patched V against the incoming input's V"));
    }
    prof.conditions = checks;
    prof.report.checks = checks;
    for (const auto& c : checks) {
        if (!c.pass) {
            prof.constructed = false;
            prof.failure = "patch failure: " + c.name + " (" + c.detail + ")";
            break;
        }
    }
    return prof;
}

}  // namespace fastreact
