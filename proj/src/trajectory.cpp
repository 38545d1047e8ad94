#include "fastreact/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "fastreact/error.hpp"

namespace fastreact {

StepSchedule make_step_schedule(std::span<const double> output_times, double dt) {
    if (!(dt > 0) || !std::isfinite(dt)) throw PreconditionError("step schedule: dt must be positive and finite");
    if (output_times.empty()) throw PreconditionError("step schedule: no output times");
    for (std::size_t i = 1; i < output_times.size(); ++i)
        if (!(output_times[i] > output_times[i - 1]))
            throw PreconditionError("step schedule: output times must be strictly increasing");
    StepSchedule s;
    s.marks.push_back(0);
    for (std::size_t i = 1; i < output_times.size(); ++i) {
        const double span = output_times[i] - output_times[i - 1];
        auto full = static_cast<std::size_t>(std::floor(span / dt));
        double rest = span - static_cast<double>(full) * dt;
        if (full > 0 && rest < 1e-9 * dt) {
            // absorb the rounding remainder into the last full step
            for (std::size_t n = 0; n + 1 < full; ++n) s.steps.push_back(dt);
            s.steps.push_back(span - static_cast<double>(full - 1) * dt);
        } else {
            for (std::size_t n = 0; n < full; ++n) s.steps.push_back(dt);
            s.steps.push_back(rest);
        }
        s.marks.push_back(s.steps.size());
    }
    return s;
}

std::vector<double> uniform_times(double T, std::size_t n) {
    if (n < 2) throw PreconditionError("uniform_times: need at least two times");
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = T * static_cast<double>(i) / static_cast<double>(n - 1);
    t.back() = T;
    return t;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::unique_ptr<FILE, int (*)(FILE*)> f(std::fopen(path.c_str(), "w"), &std::fclose);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    const bool two_d = traj.grid.dim() == 2;
    std::fprintf(f.get(), "t,x%s,u%s\n", two_d ? ",y" : "", traj.has_v() ? ",v" : "");
    for (std::size_t s = 0; s < traj.size(); ++s) {
        for (std::size_t n = 0; n < traj.grid.size(); ++n) {
            const auto p = traj.grid.position(n);
            std::fprintf(f.get(), "%.17g,%.17g", traj.times[s], p[0]);
            if (two_d) std::fprintf(f.get(), ",%.17g", p[1]);
            std::fprintf(f.get(), ",%.17g", traj.u[s][n]);
            if (traj.has_v()) std::fprintf(f.get(), ",%.17g", traj.v[s][n]);
            std::fputc('\n', f.get());
        }
    }
}

Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trajectory '" + path + "'");
    std::string header;
    std::getline(in, header);
    bool two_d = false, has_v = false;
    if (header == "t,x,u") {
    } else if (header == "t,x,u,v") {
        has_v = true;
    } else if (header == "t,x,y,u") {
        two_d = true;
    } else if (header == "t,x,y,u,v") {
        two_d = has_v = true;
    } else {
        throw ConfigError("trajectory '" + path + "': unrecognised header '" + header + "'");
    }
    struct Row {
        double t, x, y, u, v;
    };
    std::vector<Row> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Row r{0, 0, 0, 0, 0};
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ls, cell, ',')) {
            try {
                vals.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError("trajectory '" + path + "': bad number '" + cell + "'");
            }
        }
        const std::size_t want = 3 + (two_d ? 1 : 0) + (has_v ? 1 : 0);
        if (vals.size() != want) throw ConfigError("trajectory '" + path + "': wrong column count");
        std::size_t c = 0;
        r.t = vals[c++];
        r.x = vals[c++];
        if (two_d) r.y = vals[c++];
        r.u = vals[c++];
        if (has_v) r.v = vals[c++];
        rows.push_back(r);
    }
    if (rows.empty()) throw ConfigError("trajectory '" + path + "': no data");

    std::set<double> xs, ys;
    const double t0 = rows.front().t;
    std::size_t per_snapshot = 0;
    while (per_snapshot < rows.size() && rows[per_snapshot].t == t0) {
        xs.insert(rows[per_snapshot].x);
        ys.insert(rows[per_snapshot].y);
        ++per_snapshot;
    }
    Trajectory traj;
    traj.grid = two_d ? Grid::make_2d({*xs.begin(), *xs.rbegin()}, xs.size(), {*ys.begin(), *ys.rbegin()}, ys.size())
                      : Grid::make_1d({*xs.begin(), *xs.rbegin()}, xs.size());
    if (per_snapshot != traj.grid.size() || rows.size() % per_snapshot != 0)
        throw ConfigError("trajectory '" + path + "': rows do not form a tensor grid");
    for (std::size_t start = 0; start < rows.size(); start += per_snapshot) {
        Field u(traj.grid, rows[start].t), v(traj.grid, rows[start].t);
        for (std::size_t n = 0; n < per_snapshot; ++n) {
            const Row& r = rows[start + n];
            const auto p = traj.grid.position(n);
            if (r.t != rows[start].t || std::abs(r.x - p[0]) > 1e-9 * (1 + std::abs(p[0])) ||
                std::abs(r.y - p[1]) > 1e-9 * (1 + std::abs(p[1])))
                throw ConfigError("trajectory '" + path + "': node order differs from the grid ordering");
            u[n] = r.u;
            v[n] = r.v;
        }
        traj.times.push_back(rows[start].t);
        traj.u.push_back(std::move(u));
        if (has_v) traj.v.push_back(std::move(v));
    }
    return traj;
}

}  // namespace fastreact
