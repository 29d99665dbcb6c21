#include "qrt/problem_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "qrt/errors.hpp"

namespace qrt {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& msg) { throw Error(ErrorKind::ParseError, msg); }

ProjCoord parse_complex(const json& j, const std::string& field) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf" || s == "infinity") return ProjCoord::infinity();
        parse_fail("field '" + field + "': expected [re, im], a number or \"inf\", got \"" + s + "\"");
    }
    if (j.is_number()) return ProjCoord(j.get<double>());
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return ProjCoord(cd(j[0].get<double>(), j[1].get<double>()));
    }
    parse_fail("field '" + field + "': expected [re, im], a number or \"inf\"");
}

cd parse_finite(const json& j, const std::string& field) {
    const ProjCoord z = parse_complex(j, field);
    if (z.is_infinite()) parse_fail("field '" + field + "': must be finite");
    return z.value();
}

Mat3 parse_matrix(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 3) parse_fail("field '" + field + "': expected a 3x3 array");
    Mat3 m{};
    for (int i = 0; i < 3; ++i) {
        if (!j[i].is_array() || j[i].size() != 3) {
            parse_fail("field '" + field + "[" + std::to_string(i) + "]': expected 3 entries");
        }
        for (int k = 0; k < 3; ++k) {
            m[i][k] = parse_finite(j[i][k], field + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
        }
    }
    return m;
}

ProjPoint parse_point(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2) parse_fail("field '" + field + "': expected [x, y]");
    return {parse_complex(j[0], field + "[0]"), parse_complex(j[1], field + "[1]")};
}

const json& require(const json& j, const char* key) {
    if (!j.contains(key)) parse_fail(std::string("missing field '") + key + "'");
    return j.at(key);
}

std::string fmt17(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json complex_json(const ProjCoord& z) {
    if (z.is_infinite()) return "inf";
    const cd v = z.value();
    return json::array({v.real(), v.imag()});
}
json complex_json(cd v) { return json::array({v.real(), v.imag()}); }

json point_json(const ProjPoint& p) { return json::array({complex_json(p.x), complex_json(p.y)}); }

double parse_double(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
}

ProjCoord coord_from(double re, double im) {
    if (std::isinf(re) || std::isinf(im)) return ProjCoord::infinity();
    return ProjCoord(cd(re, im));
}

}  // namespace

Problem parse_problem(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const long line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
        parse_fail("line " + std::to_string(line) + ": " + e.what());
    }
    if (!j.is_object()) parse_fail("top level must be an object");
    Problem p;
    p.map.A = parse_matrix(require(j, "A"), "A");
    p.map.B = parse_matrix(require(j, "B"), "B");
    p.p0 = {parse_complex(require(j, "x0"), "x0"), parse_complex(require(j, "y0"), "y0")};
    if (j.contains("snap_to_K")) {
        const cd K = parse_finite(j.at("snap_to_K"), "snap_to_K");
        p.snap_K = K;
        p.p0 = snap_to_curve(fix_curve(p.map, K), p.p0);
    }
    if (j.contains("marked_points")) {
        const json& mp = j.at("marked_points");
        if (!mp.is_array() || mp.size() != 2) parse_fail("field 'marked_points': expected [[x1, y1], [x2, y2]]");
        const ProjPoint p1 = parse_point(mp[0], "marked_points[0]");
        const ProjPoint p2 = parse_point(mp[1], "marked_points[1]");
        p.cfg.marked = MoebiusPair{p1.x, p1.y, p2.x, p2.y};
    }
    if (j.contains("basepoint")) p.cfg.basepoint = parse_point(j.at("basepoint"), "basepoint");
    if (j.contains("config")) {
        const json& c = j.at("config");
        if (!c.is_object()) parse_fail("field 'config': expected an object");
        try {
            if (c.contains("steps")) p.steps = c.at("steps").get<long>();
            if (c.contains("tol_orbit")) p.cfg.tol_orbit = c.at("tol_orbit").get<double>();
            if (c.contains("tol_intermediate")) p.cfg.tol_intermediate = c.at("tol_intermediate").get<double>();
            if (c.contains("seed")) p.cfg.seed = c.at("seed").get<std::uint64_t>();
            if (c.contains("parallel")) p.cfg.parallel = c.at("parallel").get<bool>();
        } catch (const json::exception& e) {
            parse_fail(std::string("field 'config': ") + e.what());
        }
    }
    return p;
}

Problem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) parse_fail("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_problem(ss.str());
    } catch (const Error& e) {
        throw Error(e.kind(), path + ": " + e.what());
    }
}

std::string format_exact(const ProjCoord& z) {
    if (z.is_infinite()) return "inf";
    const cd v = z.value();
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gi", v.real(), v.imag());
    return buf;
}

void write_params_text(std::ostream& os, const SolutionParams& p) {
    auto c = [](cd v) { return format_exact(ProjCoord(v)); };
    os << "K0 = " << format_exact(p.K0) << "\n";
    os << "rho.p1 = (" << format_exact(p.rho.a1) << ", " << format_exact(p.rho.b1) << ")\n";
    os << "rho.p2 = (" << format_exact(p.rho.a2) << ", " << format_exact(p.rho.b2) << ")\n";
    os << "smoothness.g2 = " << c(p.smoothness.inv.g2) << "\n";
    os << "smoothness.g3 = " << c(p.smoothness.inv.g3) << "\n";
    os << "smoothness.delta = " << c(p.smoothness.inv.delta) << "\n";
    for (int i = 0; i <= 2; ++i)
        for (int k = 0; k <= 2; ++k) {
            if ((i == 2 && k == 2) || (i == 0 && k == 0)) continue;
            os << "normalized.a" << i << k << " = " << c(p.normalized.a(i, k)) << "\n";
        }
    for (int i = 0; i < 4; ++i) os << "branch.q" << i + 1 << " = " << c(p.branch.q[i]) << "\n";
    os << "branch.cuts = q" << p.branch.cuts[0][0] + 1 << "-q" << p.branch.cuts[0][1] + 1 << ", q"
       << p.branch.cuts[1][0] + 1 << "-q" << p.branch.cuts[1][1] + 1 << "\n";
    os << "branch.margin = " << fmt17(p.branch.margin) << "\n";
    os << "periods.delta1 = " << c(p.periods.w_delta1) << "\n";
    os << "periods.delta2 = " << c(p.periods.w_delta2) << "\n";
    os << "lattice.w1 = " << c(p.lattice.w1) << "\n";
    os << "lattice.w2 = " << c(p.lattice.w2) << "\n";
    os << "lattice.tau = " << c(p.lattice.tau) << "\n";
    os << "lattice.eta1 = " << c(p.lattice.eta1) << "\n";
    os << "lattice.eta2 = " << c(p.lattice.eta2) << "\n";
    os << "marked.x1 = " << c(p.x1p) << "\n";
    os << "marked.y1 = " << c(p.y1p) << "\n";
    os << "marked.x2 = " << c(p.x2p) << "\n";
    os << "marked.y2 = " << c(p.y2p) << "\n";
    os << "basepoint = (" << format_exact(p.basept.x) << ", " << format_exact(p.basept.y) << ")\n";
    for (const AbelRecord& r : p.abel) {
        os << "abel." << r.name << " = " << c(r.result.value) << "  # target (" << format_exact(r.target.x)
           << ", " << format_exact(r.target.y) << "), " << r.result.path.waypoints.size() << " waypoints"
           << (r.result.path.ends_at_infinity ? ", ends at x = inf" : "")
           << (r.result.detour ? ", sheet detour around q1" : "") << "\n";
    }
    os << "embedding.e1 = " << c(p.embedding.e1) << "\n";
    os << "embedding.e2 = " << c(p.embedding.e2) << "\n";
    os << "embedding.hx = " << c(p.embedding.hx) << "\n";
    os << "embedding.hy = " << c(p.embedding.hy) << "\n";
    os << "embedding.c1 = " << c(p.embedding.c1) << "\n";
    os << "embedding.c2 = " << c(p.embedding.c2) << "\n";
    os << "embedding.c1_alt = " << c(p.c1_alt) << "\n";
    os << "embedding.c2_alt = " << c(p.c2_alt) << "\n";
    os << "u0 = " << c(p.u0) << "\n";
    os << "step = " << c(p.step) << (p.step_flipped ? "  # sign fixed by the n = 1 check" : "") << "\n";
}

void write_params_json(std::ostream& os, const SolutionParams& p) {
    json j;
    j["K0"] = complex_json(p.K0);
    j["rho"] = {{"p1", point_json(p.rho.p1())}, {"p2", point_json(p.rho.p2())}};
    j["smoothness"] = {{"g2", complex_json(p.smoothness.inv.g2)},
                       {"g3", complex_json(p.smoothness.inv.g3)},
                       {"delta", complex_json(p.smoothness.inv.delta)}};
    json norm = json::array();
    for (int i = 0; i < 3; ++i) {
        json row = json::array();
        for (int k = 0; k < 3; ++k) row.push_back(complex_json(p.normalized.c[i][k]));
        norm.push_back(row);
    }
    j["normalized"] = norm;
    json q = json::array();
    for (const cd& v : p.branch.q) q.push_back(complex_json(v));
    j["branch"] = {{"q", q},
                   {"cuts", {{p.branch.cuts[0][0], p.branch.cuts[0][1]}, {p.branch.cuts[1][0], p.branch.cuts[1][1]}}},
                   {"margin", p.branch.margin}};
    j["periods"] = {{"delta1", complex_json(p.periods.w_delta1)}, {"delta2", complex_json(p.periods.w_delta2)}};
    j["lattice"] = {{"w1", complex_json(p.lattice.w1)},     {"w2", complex_json(p.lattice.w2)},
                    {"tau", complex_json(p.lattice.tau)},   {"eta1", complex_json(p.lattice.eta1)},
                    {"eta2", complex_json(p.lattice.eta2)}, {"basis_change", p.lattice.basis_change}};
    j["marked"] = {{"x1", complex_json(p.x1p)}, {"y1", complex_json(p.y1p)},
                   {"x2", complex_json(p.x2p)}, {"y2", complex_json(p.y2p)}};
    j["basepoint"] = point_json(p.basept);
    json abel = json::object();
    for (const AbelRecord& r : p.abel) {
        abel[r.name] = {{"value", complex_json(r.result.value)},
                        {"target", point_json(r.target)},
                        {"waypoints", r.result.path.waypoints.size()},
                        {"ends_at_infinity", r.result.path.ends_at_infinity},
                        {"detour", r.result.detour}};
    }
    j["abel"] = abel;
    j["embedding"] = {{"e1", complex_json(p.embedding.e1)},  {"e2", complex_json(p.embedding.e2)},
                      {"hx", complex_json(p.embedding.hx)},  {"hy", complex_json(p.embedding.hy)},
                      {"c1", complex_json(p.embedding.c1)},  {"c2", complex_json(p.embedding.c2)},
                      {"c1_alt", complex_json(p.c1_alt)},    {"c2_alt", complex_json(p.c2_alt)}};
    j["u0"] = complex_json(p.u0);
    j["step"] = complex_json(p.step);
    j["step_flipped"] = p.step_flipped;
    os << j.dump(2) << "\n";
}

void write_verification_text(std::ostream& os, const VerificationReport& r) {
    os << "orbit.rows = " << r.forward.size() + r.backward.size() << "\n";
    os << "orbit.max_chordal = " << fmt17(r.max_chordal) << "\n";
    os << "K.max_residual = " << fmt17(r.max_K_residual) << "\n";
    os << "c1.consistency = " << fmt17(r.c1_consistency) << "\n";
    os << "c2.consistency = " << fmt17(r.c2_consistency) << "\n";
    os << "relation.hx = " << fmt17(r.relation_x) << "\n";
    os << "relation.hy = " << fmt17(r.relation_y) << "\n";
    os << "invariants.residual = " << fmt17(r.invariants_residual) << "\n";
    os << "pass = " << (r.pass ? "true" : "false") << "\n";
    for (const std::string& f : r.failures) os << "failure = " << f << "\n";
}

void write_verification_json(std::ostream& os, const VerificationReport& r) {
    json j = {{"rows", r.forward.size() + r.backward.size()},
              {"max_chordal", r.max_chordal},
              {"max_K_residual", r.max_K_residual},
              {"c1_consistency", r.c1_consistency},
              {"c2_consistency", r.c2_consistency},
              {"relation_hx", r.relation_x},
              {"relation_hy", r.relation_y},
              {"invariants_residual", r.invariants_residual},
              {"orbit_ok", r.orbit_ok},
              {"K_ok", r.K_ok},
              {"c_ok", r.c_ok},
              {"relations_ok", r.relations_ok},
              {"invariants_ok", r.invariants_ok},
              {"pass", r.pass},
              {"failures", r.failures}};
    os << j.dump(2) << "\n";
}

void write_orbit_csv(std::ostream& os, const VerificationReport& r) {
    os << "n,x_closed_re,x_closed_im,y_closed_re,y_closed_im,x_iter_re,x_iter_im,y_iter_re,y_iter_im,chordal\n";
    auto coord = [&](const ProjCoord& z) {
        if (z.is_infinite()) return std::string("inf,inf");
        const cd v = z.value();
        return fmt17(v.real()) + "," + fmt17(v.imag());
    };
    std::vector<const OrbitRow*> rows;
    for (auto it = r.backward.rbegin(); it != r.backward.rend(); ++it) rows.push_back(&*it);
    for (const OrbitRow& row : r.forward) rows.push_back(&row);
    for (const OrbitRow* row : rows) {
        os << row->n << "," << coord(row->closed.x) << "," << coord(row->closed.y) << "," << coord(row->iterated.x)
           << "," << coord(row->iterated.y) << "," << fmt17(row->chordal) << "\n";
    }
}

std::vector<OrbitCsvRow> parse_orbit_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<OrbitCsvRow> rows;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.rfind("n,", 0) == 0) continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (f.size() != 10) parse_fail("orbit csv line " + std::to_string(lineno) + ": expected 10 columns");
        try {
            OrbitCsvRow r;
            r.n = std::stol(f[0]);
            r.closed = {coord_from(parse_double(f[1]), parse_double(f[2])),
                        coord_from(parse_double(f[3]), parse_double(f[4]))};
            r.iterated = {coord_from(parse_double(f[5]), parse_double(f[6])),
                          coord_from(parse_double(f[7]), parse_double(f[8]))};
            r.chordal = parse_double(f[9]);
            rows.push_back(r);
        } catch (const std::logic_error&) {
            parse_fail("orbit csv line " + std::to_string(lineno) + ": malformed number");
        }
    }
    return rows;
}

std::vector<OrbitCsvRow> load_orbit_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) parse_fail("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_orbit_csv(ss.str());
}

double compare_orbits(const std::vector<OrbitCsvRow>& a, const std::vector<OrbitCsvRow>& b) {
    std::map<long, const OrbitCsvRow*> by_n;
    for (const OrbitCsvRow& r : b) by_n[r.n] = &r;
    double worst = 0.0;
    bool any = false;
    for (const OrbitCsvRow& r : a) {
        auto it = by_n.find(r.n);
        if (it == by_n.end()) continue;
        any = true;
        worst = std::max(worst, chordal(r.closed, it->second->closed));
    }
    if (!any) throw Error(ErrorKind::InvalidInput, "compare: the orbit tables share no n");
    return worst;
}

bool reverify_orbit(const std::vector<OrbitCsvRow>& rows, double tol) {
    for (const OrbitCsvRow& r : rows) {
        if (!(chordal(r.closed, r.iterated) < tol)) return false;
    }
    return !rows.empty();
}

void write_path_csv(std::ostream& os, const std::vector<cd>& waypoints) {
    os << "segment_index,x_re,x_im\n";
    for (std::size_t k = 0; k < waypoints.size(); ++k) {
        os << k << "," << fmt17(waypoints[k].real()) << "," << fmt17(waypoints[k].imag()) << "\n";
    }
}

void write_branch_csv(std::ostream& os, const BranchData& b) {
    os << "index,x_re,x_im,cut_with\n";
    for (int i = 0; i < 4; ++i) {
        int partner = -1;
        for (const auto& cut : b.cuts) {
            if (cut[0] == i) partner = cut[1];
            if (cut[1] == i) partner = cut[0];
        }
        os << i + 1 << "," << fmt17(b.q[i].real()) << "," << fmt17(b.q[i].imag()) << "," << partner + 1 << "\n";
    }
}

std::vector<std::string> write_path_dump(const std::string& dir, const SolutionParams& p) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> names;
    auto emit = [&](const std::string& name, const std::vector<cd>& pts) {
        std::ofstream out(std::filesystem::path(dir) / name);
        write_path_csv(out, pts);
        names.push_back(name);
    };
    emit("delta1.csv", p.periods.delta1.waypoints);
    emit("delta2.csv", p.periods.delta2.waypoints);
    for (const char* key : {"e1", "hx_e1", "hy_e1", "e2", "hx_e2", "hy_e2"}) {
        for (const AbelRecord& r : p.abel) {
            if (r.name == key) emit(r.name + ".csv", r.result.path.waypoints);
        }
    }
    std::ofstream out(std::filesystem::path(dir) / "branch_points.csv");
    write_branch_csv(out, p.branch);
    names.push_back("branch_points.csv");
    return names;
}

}  // namespace qrt
