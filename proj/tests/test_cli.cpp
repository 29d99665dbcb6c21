#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "qrt/problem_io.hpp"

namespace fs = std::filesystem;
using namespace qrt;

namespace {

std::string fixture(const char* name) { return std::string(QRT_FIXTURE_DIR) + "/" + name; }

int run(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(QRT_SOLVE_EXE) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const char* name) {
    const fs::path d = fs::temp_directory_path() / (std::string("qrt_cli_test_") + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("solve phi1 and compare phi2 against it") {
    const fs::path d = scratch("solve");
    CHECK(run("solve " + fixture("phi1.json") + " --out " + (d / "phi1").string(), d / "log1") == 0);
    const auto rows = load_orbit_csv((d / "phi1" / "orbit.csv").string());
    CHECK(rows.size() == 61);
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, r.chordal);
    CHECK(worst < 1e-6);
    CHECK(fs::exists(d / "phi1" / "params.txt"));
    CHECK(fs::exists(d / "phi1" / "verification.txt"));

    CHECK(run("solve " + fixture("phi2.json") + " --out " + (d / "phi2").string() + " --compare " +
                  (d / "phi1" / "orbit.csv").string(),
              d / "log2") == 0);
    CHECK(slurp(d / "log2").find("compare") != std::string::npos);
}

TEST_CASE("singular fixture exits with code 2") {
    const fs::path d = scratch("singular");
    CHECK(run("solve " + fixture("singular.json") + " --out " + (d / "out").string(), d / "log") == 2);
    const std::string log = slurp(d / "log");
    CHECK(log.find("CurveNotSmooth") != std::string::npos);
    CHECK(log.find("Eisenstein invariant") != std::string::npos);
}

TEST_CASE("parse errors exit with code 1 and name the problem") {
    const fs::path d = scratch("parse");
    std::ofstream(d / "bad.json") << "{\n  \"A\": [[0, 1, 0],\n";
    CHECK(run("solve " + (d / "bad.json").string() + " --out " + (d / "out").string(), d / "log") == 1);
    CHECK(slurp(d / "log").find("line") != std::string::npos);
}

TEST_CASE("json reports and byte-identical reruns") {
    const fs::path d = scratch("json");
    CHECK(run("solve " + fixture("phi1.json") + " --report json --out " + (d / "a").string(), d / "la") == 0);
    CHECK(run("solve " + fixture("phi1.json") + " --report json --out " + (d / "b").string(), d / "lb") == 0);
    for (const char* f : {"params.json", "verification.json", "orbit.csv"}) {
        CHECK(fs::exists(d / "a" / f));
        CHECK(slurp(d / "a" / f) == slurp(d / "b" / f));
    }
}

TEST_CASE("path dump") {
    const fs::path d = scratch("paths");
    CHECK(run("paths " + fixture("phi1.json") + " --out " + (d / "p").string(), d / "log") == 0);
    int path_files = 0;
    for (const auto& e : fs::directory_iterator(d / "p")) {
        if (e.path().filename() != "branch_points.csv") ++path_files;
    }
    CHECK(path_files == 8);
    std::ifstream in(d / "p" / "branch_points.csv");
    std::string line;
    std::getline(in, line);
    std::vector<std::complex<double>> q;
    while (std::getline(in, line)) {
        double re, im;
        int idx, cut;
        REQUIRE(std::sscanf(line.c_str(), "%d,%lf,%lf,%d", &idx, &re, &im, &cut) == 4);
        q.emplace_back(re, im);
    }
    CHECK(q.size() == 4);
    const std::array<std::complex<double>, 4> printed{std::complex<double>(-1.69314, 0.647424),
                                                      std::complex<double>(-1.01244, 0.358514),
                                                      std::complex<double>(0.264181, -0.0620125),
                                                      std::complex<double>(1.083, 0.827275)};
    for (const auto& p : printed) {
        double best = 1e9;
        for (const auto& v : q) best = std::min(best, std::abs(v - p));
        CHECK(best < 1e-5);
    }
    // Every dumped waypoint keeps the margin from every branch point.
    const Problem prob = load_problem(fixture("phi1.json"));
    const double margin = solve(prob.map, prob.p0, prob.cfg).branch.margin;
    for (const auto& e : fs::directory_iterator(d / "p")) {
        if (e.path().filename() == "branch_points.csv") continue;
        std::ifstream f(e.path());
        std::getline(f, line);
        int rows = 0;
        while (std::getline(f, line)) {
            long k;
            double re, im;
            REQUIRE(std::sscanf(line.c_str(), "%ld,%lf,%lf", &k, &re, &im) == 3);
            for (const auto& v : q) CHECK(std::abs(std::complex<double>(re, im) - v) >= margin * (1.0 - 1e-9));
            ++rows;
        }
        CHECK(rows >= 2);
    }
}

TEST_CASE("solve --paths writes the dump next to the reports") {
    const fs::path d = scratch("solvepaths");
    CHECK(run("solve " + fixture("phi1.json") + " --paths --steps 5 --out " + (d / "o").string(), d / "log") == 0);
    CHECK(fs::exists(d / "o" / "delta1.csv"));
    CHECK(fs::exists(d / "o" / "hy_e1.csv"));
    CHECK(load_orbit_csv((d / "o" / "orbit.csv").string()).size() == 11);
}
