#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "qrt/errors.hpp"
#include "qrt/problem_io.hpp"
#include "qrt/solver.hpp"

namespace fs = std::filesystem;
using namespace qrt;

namespace {

struct Options {
    std::string problem;
    std::optional<long> steps;
    std::optional<double> tol_orbit, tol_intermediate;
    std::optional<std::uint64_t> seed;
    std::string out = "qrt_out";
    std::string compare;
    bool paths = false;
    std::string report = "text";
};

Problem load(const Options& o) {
    Problem p = load_problem(o.problem);
    if (o.steps) p.steps = *o.steps;
    if (o.tol_orbit) p.cfg.tol_orbit = *o.tol_orbit;
    if (o.tol_intermediate) p.cfg.tol_intermediate = *o.tol_intermediate;
    if (o.seed) p.cfg.seed = *o.seed;
    return p;
}

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    out << body;
    if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + path.string());
}

int run_solve(const Options& o) {
    const Problem prob = load(o);
    const SolutionParams params = solve(prob.map, prob.p0, prob.cfg);
    const VerificationReport rep = verify(params, prob.map, prob.p0, prob.steps, prob.cfg);

    fs::create_directories(o.out);
    const bool json = o.report == "json";
    std::ostringstream ps, vs, os;
    if (json) {
        write_params_json(ps, params);
        write_verification_json(vs, rep);
    } else {
        write_params_text(ps, params);
        write_verification_text(vs, rep);
    }
    write_orbit_csv(os, rep);
    write_file(fs::path(o.out) / (json ? "params.json" : "params.txt"), ps.str());
    write_file(fs::path(o.out) / (json ? "verification.json" : "verification.txt"), vs.str());
    write_file(fs::path(o.out) / "orbit.csv", os.str());
    if (o.paths) write_path_dump(o.out, params);

    bool ok = rep.pass;
    std::printf("K0        %s\n", format_coord(params.K0).c_str());
    std::printf("w1, w2    %s, %s\n", format_complex(params.lattice.w1).c_str(),
                format_complex(params.lattice.w2).c_str());
    std::printf("c1, c2    %s, %s\n", format_complex(params.embedding.c1).c_str(),
                format_complex(params.embedding.c2).c_str());
    std::printf("u0        %s\n", format_complex(params.u0).c_str());
    std::printf("step      %s\n", format_complex(params.step).c_str());
    std::printf("orbit     n = -%ld..%ld, max chordal error %.3g\n", static_cast<long>(rep.backward.size()),
                prob.steps, rep.max_chordal);
    if (!o.compare.empty()) {
        const auto other = load_orbit_csv(o.compare);
        const auto mine = parse_orbit_csv(os.str());
        const double d = compare_orbits(mine, other);
        std::printf("compare   max distance to %s: %.3g\n", o.compare.c_str(), d);
        if (!(d < prob.cfg.tol_orbit)) {
            std::fprintf(stderr, "qrt_solve: orbit differs from %s by %.3g\n", o.compare.c_str(), d);
            ok = false;
        }
    }
    for (const std::string& f : rep.failures) std::fprintf(stderr, "qrt_solve: verification failed: %s\n", f.c_str());
    std::printf("status    %s\n", ok ? "pass" : "FAIL");
    return ok ? 0 : 1;
}

int run_paths(const Options& o) {
    const Problem prob = load(o);
    const SolutionParams params = solve(prob.map, prob.p0, prob.cfg);
    const auto names = write_path_dump(o.out, params);
    for (const std::string& n : names) std::printf("%s\n", (fs::path(o.out) / n).string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Closed-form solutions of QRT maps via Weierstrass sigma functions"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("problem", o.problem, "Problem file (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "Seed for marked-point and basepoint selection");
        sub->add_option("--out", o.out, "Output directory")->capture_default_str();
        sub->add_option("--tol-orbit", o.tol_orbit, "Chordal tolerance for the orbit check");
        sub->add_option("--tol-intermediate", o.tol_intermediate, "Tolerance for intermediate relations");
    };
    CLI::App* solve_cmd = app.add_subcommand("solve", "Solve, verify against iteration, write reports");
    add_common(solve_cmd);
    solve_cmd->add_option("--steps", o.steps, "Orbit length");
    solve_cmd->add_option("--compare", o.compare, "Orbit CSV of another run to compare with")
        ->check(CLI::ExistingFile);
    solve_cmd->add_flag("--paths", o.paths, "Also dump the integration paths");
    solve_cmd->add_option("--report", o.report, "Report format")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    CLI::App* paths_cmd = app.add_subcommand("paths", "Dump integration paths and branch points as CSV");
    add_common(paths_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve_cmd) return run_solve(o);
        return run_paths(o);
    } catch (const Error& e) {
        const std::string where = e.stage().empty() ? "" : "stage '" + e.stage() + "': ";
        std::fprintf(stderr, "qrt_solve: %s%s: %s\n", where.c_str(), to_string(e.kind()), e.what());
        return e.kind() == ErrorKind::CurveNotSmooth ? 2 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "qrt_solve: %s\n", e.what());
        return 1;
    }
}
