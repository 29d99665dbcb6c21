#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qrt/elliptic.hpp"
#include "qrt/pencil.hpp"
#include "qrt/qrt_map.hpp"
#include "qrt/riemann.hpp"

namespace qrt {

struct SolverConfig {
    std::uint64_t seed = 1;
    /// Marked points p1, p2 in the original coordinates; chosen by search if unset.
    std::optional<MoebiusPair> marked;
    /// Origin O in the original coordinates. Its y is snapped to the nearest
    /// curve point over its x. Chosen by search if unset.
    std::optional<ProjPoint> basepoint;
    double tol_orbit = 1e-6;
    double tol_intermediate = 1e-4;
    bool parallel = true;
};

/// One Abel integral of the pipeline with the path it used.
struct AbelRecord {
    std::string name;
    SheetedPoint target;  // normalized coordinates
    AbelResult result;
};

struct SolutionParams {
    ProjPoint p0;
    ProjCoord K0;              // infinite when the orbit lies on x^T B y = 0
    Biquadratic curve;         // the fixed invariant curve
    SmoothnessReport smoothness;
    MoebiusPair rho;
    Biquadratic normalized;
    BranchData branch;
    PeriodLoops periods;
    Lattice lattice;
    std::optional<SigmaEvaluator> evaluator;  // built from `lattice`
    EmbeddingParams embedding;
    cd u0, step;
    bool step_flipped = false;
    SheetedPoint basept;       // normalized coordinates
    cd x1p, y1p, x2p, y2p;     // marked coordinates on the normalized curve

    // The six Abel values, in the order e2, hx-e2, hy-e2, e1, hx'-e1, hy'-e1.
    cd e2, hx_e2, hy_e2, e1, hx_e1, hy_e1;
    // c1, c2 determined from the e1 chain.
    cd c1_alt, c2_alt;

    std::vector<AbelRecord> abel;  // six marked targets then u0
};

SolutionParams solve(const QrtMap& map, const ProjPoint& p0, const SolverConfig& cfg = {});

/// Closed-form n-th iterate rho^{-1}(c1 F12(u0 + n step), c2 G12(u0 + n step)).
ProjPoint eval_solution(const SolutionParams& params, long n);

/// eval_solution for n = first, ..., first + count - 1 (OpenMP when `parallel`).
std::vector<ProjPoint> eval_orbit(const SolutionParams& params, long first, long count, bool parallel = true);
/// Reference implementation of eval_orbit: a plain loop.
std::vector<ProjPoint> eval_orbit_serial(const SolutionParams& params, long first, long count);

struct OrbitRow {
    long n = 0;
    ProjPoint closed, iterated;
    double chordal = 0.0;
};

struct VerificationReport {
    std::vector<OrbitRow> forward;   // n = 0 .. n_max
    std::vector<OrbitRow> backward;  // n = -1 .. -min(10, n_max)
    double max_chordal = 0.0;
    double max_K_residual = 0.0;
    double c1_consistency = 0.0;     // |c1' - c1| / |c1|
    double c2_consistency = 0.0;
    double relation_x = 0.0;         // e2 + (hx - e2) vs e1 + (hx' - e1), reduced
    double relation_y = 0.0;
    double invariants_residual = 0.0;  // g2, g3: quartic vs lattice, relative
    bool orbit_ok = false, K_ok = false, c_ok = false, relations_ok = false, invariants_ok = false;
    bool pass = false;
    std::vector<std::string> failures;
};

VerificationReport verify(const SolutionParams& params, const QrtMap& map, const ProjPoint& p0, long n_max,
                          const SolverConfig& cfg = {});

/// |K(p) - K0| / (1 + |K0|) with K(p) = -(x^T B y)/(x^T A y); chordal distance
/// when either value is infinite.
double K_residual(const QrtMap& map, const ProjPoint& p, const ProjCoord& K0);

/// Replaces p.y by the root of A + K B over p.x nearest to it.
ProjPoint snap_to_curve(const Biquadratic& curve, const ProjPoint& p);

}  // namespace qrt
