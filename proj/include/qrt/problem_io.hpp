#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qrt/solver.hpp"

namespace qrt {

struct Problem {
    QrtMap map;
    ProjPoint p0;
    SolverConfig cfg;
    long steps = 50;
    /// When set, y0 was moved to the nearest root of A + K B over x0.
    std::optional<cd> snap_K;
};

/// Parses the JSON problem format. Complex numbers are [re, im], plain
/// numbers, or "inf". Throws ParseError naming the line or field.
Problem parse_problem(const std::string& text);
Problem load_problem(const std::string& path);

/// Full-precision "a+bi" (17 significant digits); "inf" at infinity.
std::string format_exact(const ProjCoord& z);

void write_params_text(std::ostream& os, const SolutionParams& p);
void write_params_json(std::ostream& os, const SolutionParams& p);
void write_verification_text(std::ostream& os, const VerificationReport& r);
void write_verification_json(std::ostream& os, const VerificationReport& r);

/// Orbit table: n, closed-form x/y, iterated x/y, chordal error.
void write_orbit_csv(std::ostream& os, const VerificationReport& r);

struct OrbitCsvRow {
    long n = 0;
    ProjPoint closed, iterated;
    double chordal = 0.0;
};
std::vector<OrbitCsvRow> parse_orbit_csv(const std::string& text);
std::vector<OrbitCsvRow> load_orbit_csv(const std::string& path);

/// Max chordal distance between closed-form points at matching n; only rows
/// with n present in both tables count. Throws InvalidInput if none match.
double compare_orbits(const std::vector<OrbitCsvRow>& a, const std::vector<OrbitCsvRow>& b);

/// Recomputes the per-row chordal error from the parsed points and checks it
/// against the tolerance.
bool reverify_orbit(const std::vector<OrbitCsvRow>& rows, double tol);

/// Path dump: one CSV per integral (segment_index, x_re, x_im).
void write_path_csv(std::ostream& os, const std::vector<cd>& waypoints);
/// Branch points with the index of the point each one is joined to by a cut.
void write_branch_csv(std::ostream& os, const BranchData& b);

/// Writes delta1.csv, delta2.csv, the six Abel path files and
/// branch_points.csv into `dir`. Returns the file names written.
std::vector<std::string> write_path_dump(const std::string& dir, const SolutionParams& p);

}  // namespace qrt
