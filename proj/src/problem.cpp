#include "fastreact/problem.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "fastreact/error.hpp"

namespace fastreact {

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"domain", {"x", "y"}},
        {"support", {"kind", "intervals", "center", "radius", "half_widths", "corner_radius"}},
        {"initial.u0", {"outside", "inside"}},
        {"initial.v0", {"inside", "outside"}},
        {"params", {"k", "m3", "m4", "T"}},
        {"grid", {"points"}},
        {"solver", {"reaction_dt_factor", "dt", "seed", "snapshots"}},
        {"analysis", {"interior", "theta"}},
    };
    return keys;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    // Keep TOML floats recognisable as floats.
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

double require_number(const toml::node_view<const toml::node>& node, const std::string& where) {
    if (auto v = node.value<double>()) return *v;
    throw ConfigError(where + ": expected a number");
}

std::optional<double> optional_number(const toml::table& t, const char* key, const std::string& section) {
    auto n = t[key];
    if (!n) return std::nullopt;
    return require_number(n, section + "." + key);
}

Extent read_extent(const toml::node_view<const toml::node>& node, const std::string& where) {
    const auto* arr = node.as_array();
    if (!arr || arr->size() != 2) throw ConfigError(where + ": expected [lo, hi]");
    auto lo = (*arr)[0].value<double>();
    auto hi = (*arr)[1].value<double>();
    if (!lo || !hi) throw ConfigError(where + ": expected numeric bounds");
    return {*lo, *hi};
}

std::array<double, 2> read_pair(const toml::node_view<const toml::node>& node, const std::string& where) {
    const auto e = read_extent(node, where);
    return {e.lo, e.hi};
}

Expression read_expression(const toml::table& t, const char* key, const std::string& section,
                           const Expression& fallback) {
    auto n = t[key];
    if (!n) return fallback;
    if (auto s = n.value<std::string>()) return Expression::parse(*s);
    if (auto d = n.value<double>()) return Expression::constant(*d);
    throw ConfigError(section + "." + key + ": expected an expression string");
}

const toml::table* section(const toml::table& root, const std::string& dotted) {
    const toml::table* t = &root;
    std::size_t start = 0;
    while (start <= dotted.size()) {
        const auto dot = dotted.find('.', start);
        const std::string part = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        const auto* next = t->get_as<toml::table>(part);
        if (!next) return nullptr;
        t = next;
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    return t;
}

void reject_unknown(const toml::table& root) {
    const auto& keys = known_keys();
    for (const auto& [name, node] : root) {
        const std::string top(name.str());
        if (top == "initial") {
            const auto* init = node.as_table();
            if (!init) throw ConfigError("initial: expected a table");
            for (const auto& [sub, subnode] : *init) {
                const std::string full = "initial." + std::string(sub.str());
                if (!keys.count(full)) throw ConfigError("unknown section [" + full + "]");
                (void)subnode;
            }
            continue;
        }
        if (!keys.count(top)) throw ConfigError("unknown section [" + top + "]");
        if (!node.is_table()) throw ConfigError("[" + top + "] must be a table");
    }
    for (const auto& [name, allowed] : keys) {
        const auto* t = section(root, name);
        if (!t) continue;
        for (const auto& [key, node] : *t) {
            (void)node;
            if (!allowed.count(std::string(key.str())))
                throw ConfigError("unknown key '" + std::string(key.str()) + "' in [" + name + "]");
        }
    }
}

void apply_override(toml::table& root, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "': expected section.key=value");
    const std::string path = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);
    const auto dot = path.rfind('.');
    if (dot == std::string::npos) throw ConfigError("override '" + assignment + "': key must be qualified by a section");
    const std::string sec = path.substr(0, dot);
    const std::string key = path.substr(dot + 1);
    const auto& keys = known_keys();
    auto it = keys.find(sec);
    if (it == keys.end() || !it->second.count(key)) throw ConfigError("override '" + assignment + "': unknown key");

    toml::table* t = &root;
    std::size_t start = 0;
    for (;;) {
        const auto d = sec.find('.', start);
        const std::string part = sec.substr(start, d == std::string::npos ? std::string::npos : d - start);
        if (!t->contains(part)) t->insert(part, toml::table{});
        t = t->get_as<toml::table>(part);
        if (!t) throw ConfigError("override '" + assignment + "': [" + sec + "] is not a table");
        if (d == std::string::npos) break;
        start = d + 1;
    }
    toml::table parsed;
    try {
        parsed = toml::parse("v = " + value);
    } catch (const toml::parse_error&) {
        parsed = toml::table{{"v", value}};
    }
    t->insert_or_assign(key, *parsed.get("v"));
}

}  // namespace

void ProblemSpec::validate() const {
    if (!(k > 0) || !std::isfinite(k)) throw ConfigError("params.k must be positive and finite");
    if (!(m3 >= 1)) throw ConfigError("params.m3 must be >= 1");
    if (!(m4 >= 1)) throw ConfigError("params.m4 must be >= 1");
    if (!(T > 0)) throw ConfigError("params.T must be positive");
    if (grid.dim() != geometry.dim()) throw ConfigError("grid and support dimensions differ");
    for (int a = 0; a < grid.dim(); ++a) {
        if (!(grid.extent(a) == geometry.domain()[a])) throw ConfigError("grid extents differ from [domain]");
    }
    if (!(solver.reaction_dt_factor > 0)) throw ConfigError("solver.reaction_dt_factor must be positive");
    if (solver.dt_override < 0) throw ConfigError("solver.dt must be >= 0");
    if (solver.snapshots < 2) throw ConfigError("solver.snapshots must be >= 2");
    for (const auto& box : analysis.interior) {
        if (static_cast<int>(box.size()) != grid.dim()) throw ConfigError("analysis.interior: box dimension mismatch");
        for (const auto& e : box)
            if (!(e.hi > e.lo)) throw ConfigError("analysis.interior: degenerate box");
    }
}

std::pair<Field, Field> eval_initial_data(const ProblemSpec& spec, bool allow_zero_u0) {
    const Grid& g = spec.grid;
    const double tol = SupportGeometry::on_interface_tolerance(g);
    Field u0(g, 0.0);
    Field v0(g, 0.0);
    std::vector<unsigned char> inside(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) {
        const auto p = g.position(n);
        const double rho = spec.geometry.signed_distance(p[0], p[1]);
        inside[n] = rho <= tol;
        const bool on_interface = std::abs(rho) <= tol;
        v0[n] = inside[n] ? spec.initial.v0_inside(p[0], p[1]) : spec.initial.v0_outside(p[0], p[1]);
        u0[n] = on_interface ? 0.0
                             : (inside[n] ? spec.initial.u0_inside(p[0], p[1]) : spec.initial.u0_outside(p[0], p[1]));
        if (!std::isfinite(u0[n]) || !std::isfinite(v0[n]))
            throw AssumptionError("initial data not finite at node " + std::to_string(n));
        // Round-off of closed forms that vanish at the interface.
        if (u0[n] < 0 && u0[n] > -1e-14) u0[n] = 0.0;
        if (v0[n] < 0 && v0[n] > -1e-14) v0[n] = 0.0;
    }
    for (std::size_t n = 0; n < g.size(); ++n) {
        if (u0[n] * v0[n] > 0) {
            const auto p = g.position(n);
            throw SegregationError("u0 * v0 > 0 at node " + std::to_string(n) + " (x = " + std::to_string(p[0]) +
                                   (g.dim() == 2 ? ", y = " + std::to_string(p[1]) : std::string()) + ")");
        }
    }
    for (std::size_t n = 0; n < g.size(); ++n) {
        if (u0[n] < 0) throw AssumptionError("u0 < 0 at node " + std::to_string(n));
        if (v0[n] < 0) throw AssumptionError("v0 < 0 at node " + std::to_string(n));
        if (inside[n] && u0[n] > 0) throw AssumptionError("u0 must vanish on supp v0 (node " + std::to_string(n) + ")");
        if (!inside[n] && v0[n] > 0)
            throw AssumptionError("v0 > 0 outside the declared support (node " + std::to_string(n) + ")");
    }
    if (!allow_zero_u0 && u0.max() <= 0) throw AssumptionError("u0 vanishes identically");
    if (v0.max() <= 0) throw AssumptionError("v0 vanishes identically");
    return {std::move(u0), std::move(v0)};
}

ProblemSpec parse_problem(const std::string& toml_text, const std::vector<std::string>& overrides) {
    toml::table root;
    try {
        root = toml::parse(toml_text);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "TOML parse error: " << e.description() << " (line " << e.source().begin.line << ")";
        throw ConfigError(os.str());
    }
    for (const auto& o : overrides) apply_override(root, o);
    reject_unknown(root);

    const auto* dom = section(root, "domain");
    if (!dom) throw ConfigError("missing [domain]");
    std::vector<Extent> domain{read_extent((*dom)["x"], "domain.x")};
    if (dom->contains("y")) domain.push_back(read_extent((*dom)["y"], "domain.y"));

    const auto* grid_sec = section(root, "grid");
    if (!grid_sec) throw ConfigError("missing [grid]");
    std::vector<std::size_t> points;
    if (const auto* arr = (*grid_sec)["points"].as_array()) {
        for (const auto& p : *arr) {
            auto v = p.value<std::int64_t>();
            if (!v || *v < 0) throw ConfigError("grid.points: expected nonnegative integers");
            points.push_back(static_cast<std::size_t>(*v));
        }
    } else if (auto v = (*grid_sec)["points"].value<std::int64_t>()) {
        points.push_back(static_cast<std::size_t>(*v));
    } else {
        throw ConfigError("grid.points missing");
    }
    if (points.size() == 1 && domain.size() == 2) points.push_back(points[0]);
    Grid grid = build_grid(domain, points);

    const auto* sup = section(root, "support");
    if (!sup) throw ConfigError("missing [support]");
    const auto kind = (*sup)["kind"].value<std::string>();
    if (!kind) throw ConfigError("support.kind missing");
    SupportGeometry::Shape shape;
    if (*kind == "intervals") {
        IntervalSupport s;
        const auto* arr = (*sup)["intervals"].as_array();
        if (!arr) throw ConfigError("support.intervals missing");
        for (std::size_t i = 0; i < arr->size(); ++i)
            s.intervals.push_back(read_extent(toml::node_view<const toml::node>((*arr)[i]), "support.intervals"));
        shape = s;
    } else if (*kind == "disk") {
        DiskComplement d;
        d.center = read_pair((*sup)["center"], "support.center");
        d.radius = require_number((*sup)["radius"], "support.radius");
        shape = d;
    } else if (*kind == "rounded_rect") {
        RoundedRectComplement r;
        r.center = read_pair((*sup)["center"], "support.center");
        r.half_widths = read_pair((*sup)["half_widths"], "support.half_widths");
        r.corner_radius = require_number((*sup)["corner_radius"], "support.corner_radius");
        shape = r;
    } else {
        throw ConfigError("support.kind must be one of intervals, disk, rounded_rect");
    }
    SupportGeometry geometry(shape, domain);

    InitialData init;
    const auto* u0s = section(root, "initial.u0");
    const auto* v0s = section(root, "initial.v0");
    if (!u0s) throw ConfigError("missing [initial.u0]");
    if (!u0s->contains("outside")) throw ConfigError("initial.u0.outside missing");
    init.u0_outside = read_expression(*u0s, "outside", "initial.u0", init.u0_outside);
    init.u0_inside = read_expression(*u0s, "inside", "initial.u0", init.u0_inside);
    if (v0s) {
        init.v0_inside = read_expression(*v0s, "inside", "initial.v0", init.v0_inside);
        init.v0_outside = read_expression(*v0s, "outside", "initial.v0", init.v0_outside);
    }

    const auto* params = section(root, "params");
    if (!params) throw ConfigError("missing [params]");
    ProblemSpec spec{grid, geometry, init, 1.0, 1.0, 1.0, 0.1, {}, {}};
    spec.k = require_number((*params)["k"], "params.k");
    spec.m3 = optional_number(*params, "m3", "params").value_or(1.0);
    spec.m4 = optional_number(*params, "m4", "params").value_or(1.0);
    spec.T = require_number((*params)["T"], "params.T");

    if (const auto* solver = section(root, "solver")) {
        spec.solver.reaction_dt_factor =
            optional_number(*solver, "reaction_dt_factor", "solver").value_or(spec.solver.reaction_dt_factor);
        spec.solver.dt_override = optional_number(*solver, "dt", "solver").value_or(0.0);
        if (auto seed = (*solver)["seed"].value<std::int64_t>()) spec.solver.seed = static_cast<std::uint64_t>(*seed);
        if (auto snaps = (*solver)["snapshots"].value<std::int64_t>()) {
            if (*snaps < 2) throw ConfigError("solver.snapshots must be >= 2");
            spec.solver.snapshots = static_cast<std::size_t>(*snaps);
        }
    }
    if (const auto* an = section(root, "analysis")) {
        if (const auto* boxes = (*an)["interior"].as_array()) {
            for (const auto& b : *boxes) {
                const auto* arr = b.as_array();
                if (!arr) throw ConfigError("analysis.interior: expected an array of boxes");
                std::vector<Extent> box;
                if (!arr->empty() && (*arr)[0].is_array()) {
                    for (const auto& e : *arr) box.push_back(read_extent(toml::node_view<const toml::node>(e), "analysis.interior"));
                } else {
                    box.push_back(read_extent(toml::node_view<const toml::node>(b), "analysis.interior"));
                }
                spec.analysis.interior.push_back(box);
            }
        }
        spec.analysis.theta = optional_number(*an, "theta", "analysis").value_or(0.0);
    }
    spec.validate();
    return spec;
}

ProblemSpec load_problem(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str(), overrides);
}

std::string to_toml(const ProblemSpec& spec) {
    std::ostringstream os;
    const auto& dom = spec.geometry.domain();
    os << "[domain]\n";
    os << "x = [" << fmt(dom[0].lo) << ", " << fmt(dom[0].hi) << "]\n";
    if (dom.size() == 2) os << "y = [" << fmt(dom[1].lo) << ", " << fmt(dom[1].hi) << "]\n";

    os << "\n[support]\n";
    std::visit(
        [&](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, IntervalSupport>) {
                os << "kind = \"intervals\"\nintervals = [";
                for (std::size_t i = 0; i < s.intervals.size(); ++i)
                    os << (i ? ", " : "") << "[" << fmt(s.intervals[i].lo) << ", " << fmt(s.intervals[i].hi) << "]";
                os << "]\n";
            } else if constexpr (std::is_same_v<S, DiskComplement>) {
                os << "kind = \"disk\"\ncenter = [" << fmt(s.center[0]) << ", " << fmt(s.center[1]) << "]\n";
                os << "radius = " << fmt(s.radius) << "\n";
            } else {
                os << "kind = \"rounded_rect\"\ncenter = [" << fmt(s.center[0]) << ", " << fmt(s.center[1]) << "]\n";
                os << "half_widths = [" << fmt(s.half_widths[0]) << ", " << fmt(s.half_widths[1]) << "]\n";
                os << "corner_radius = " << fmt(s.corner_radius) << "\n";
            }
        },
        spec.geometry.shape());

    os << "\n[initial.u0]\noutside = " << quote(spec.initial.u0_outside.source())
       << "\ninside = " << quote(spec.initial.u0_inside.source()) << "\n";
    os << "\n[initial.v0]\ninside = " << quote(spec.initial.v0_inside.source())
       << "\noutside = " << quote(spec.initial.v0_outside.source()) << "\n";
    os << "\n[params]\nk = " << fmt(spec.k) << "\nm3 = " << fmt(spec.m3) << "\nm4 = " << fmt(spec.m4)
       << "\nT = " << fmt(spec.T) << "\n";
    os << "\n[grid]\npoints = [" << spec.grid.points(0);
    if (spec.grid.dim() == 2) os << ", " << spec.grid.points(1);
    os << "]\n";
    os << "\n[solver]\nreaction_dt_factor = " << fmt(spec.solver.reaction_dt_factor)
       << "\ndt = " << fmt(spec.solver.dt_override) << "\nseed = " << spec.solver.seed
       << "\nsnapshots = " << spec.solver.snapshots << "\n";
    if (!spec.analysis.interior.empty() || spec.analysis.theta != 0.0) {
        os << "\n[analysis]\ntheta = " << fmt(spec.analysis.theta) << "\n";
        if (!spec.analysis.interior.empty()) {
            os << "interior = [";
            for (std::size_t b = 0; b < spec.analysis.interior.size(); ++b) {
                const auto& box = spec.analysis.interior[b];
                os << (b ? ", " : "");
                if (box.size() == 1) {
                    os << "[" << fmt(box[0].lo) << ", " << fmt(box[0].hi) << "]";
                } else {
                    os << "[";
                    for (std::size_t a = 0; a < box.size(); ++a)
                        os << (a ? ", " : "") << "[" << fmt(box[a].lo) << ", " << fmt(box[a].hi) << "]";
                    os << "]";
                }
            }
            os << "]\n";
        }
    }
    return os.str();
}

ProblemSpec canonical_problem(std::size_t points, double k, double m3, double m4, double T) {
    const Extent dom{-1.0, 1.0};
    SupportGeometry geometry(IntervalSupport{{{-1.0, -0.3}, {0.3, 1.0}}}, {dom});
    InitialData init;
    init.u0_outside = Expression::parse("cos(pi*x/0.6)");
    init.v0_inside = Expression::constant(1.0);
    ProblemSpec spec{Grid::make_1d(dom, points), geometry, init, k, m3, m4, T, {}, {}};
    spec.k = k;
    spec.m3 = m3;
    spec.m4 = m4;
    spec.T = T;
    spec.analysis.interior = {{{-0.9, -0.45}}, {{0.45, 0.9}}};
    spec.validate();
    return spec;
}

}  // namespace fastreact
