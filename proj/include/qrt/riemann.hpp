#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qrt/elliptic.hpp"
#include "qrt/pencil.hpp"

namespace qrt {

/// A point of the curve; its y-value selects the sheet of the double cover
/// over the x-line.
using SheetedPoint = ProjPoint;

/// Branch points of the x-projection of a normalized curve.
struct BranchData {
    std::array<cd, 4> q{};  // sorted lexicographically by (Re, Im)
    QuarticPoly quartic;
    cd leading;             // c4 = a21^2
    /// Disjoint straight cuts, as index pairs into q.
    std::array<std::array<int, 2>, 2> cuts{};
    /// Period loops: delta1 encloses q[chain[0]], q[chain[1]]; delta2 encloses
    /// q[chain[1]], q[chain[2]].
    std::array<int, 3> chain{0, 1, 2};
    double diameter = 0.0;
    /// Minimum distance kept between integration paths and branch points.
    double margin = 0.0;
};

/// Roots of the quartic (companion eigenvalues + Newton polish), default
/// cuts and loop chain. Throws DegenerateQuartic when c4 = 0 or roots collide.
BranchData branch_points(const QuarticPoly& q);

/// The two roots of P(x, .) = 0 labelled by the principal square root of
/// Delta(x). Throws PoleOfQuadratic when the y^2 coefficient vanishes at x.
std::array<cd, 2> y_branches(const Biquadratic& curve, cd x);

/// Square-root branch bookkeeping for dx / P_y on a normalized curve.
/// On the curve P_y = 2 Y2(x) y + Y1(x) = +-sqrt(Delta(x)); that value is the
/// "sheet value" s. In the chart X = 1/x the tracked quantity is X^2 s.
class DoubleCover {
public:
    DoubleCover(const Biquadratic& curve, const BranchData& branch);

    const Biquadratic& curve() const { return curve_; }
    const BranchData& branch() const { return branch_; }

    /// Sheet value at a curve point: s in the x-chart for finite x, X^2 s at
    /// X = 0 for x = inf.
    cd sheet_value(const SheetedPoint& p) const;
    /// Inverse of sheet_value: the curve point over x (finite) with sheet value s.
    SheetedPoint point_at(cd x, cd s) const;
    /// The curve point over x = inf with chart sheet value s~.
    SheetedPoint point_at_infinity(cd s_tilde) const;

    const QuarticPoly& delta() const { return delta_; }
    const QuarticPoly& delta_reversed() const { return delta_rev_; }

private:
    Biquadratic curve_;
    BranchData branch_;
    QuarticPoly delta_, delta_rev_;
    Poly y2_, y1_, y0_;
};

/// Polyline in the x-plane. With ends_at_infinity the path continues from the
/// last waypoint along the ray to x = inf (integrated in the chart X = 1/x).
struct IntegrationPath {
    std::vector<cd> waypoints;
    bool ends_at_infinity = false;
    SheetedPoint start;
};

struct TrackResult {
    cd value;
    SheetedPoint end;
    cd end_sheet;  // final tracked sheet value (chart value when ending at inf)
};

/// Integral of dx / P_y along the path with the square root continued
/// analytically from the start point's sheet. Adaptive Gauss-Legendre per
/// step. Throws StepCollapse if the branch cannot be followed.
TrackResult track_integral(const DoubleCover& cover, const IntegrationPath& path);

/// Straight route from `from` to `to`, detouring along circular arcs around
/// branch points that come closer than the margin.
std::vector<cd> route(const BranchData& branch, cd from, cd to);

/// Closed capsule loop around the segment [q[i], q[j]].
std::vector<cd> loop_around_pair(const BranchData& branch, int i, int j);

struct PeriodLoops {
    Lattice lattice;
    cd w_delta1, w_delta2;  // raw loop integrals before basis reduction
    IntegrationPath delta1, delta2;
};

PeriodLoops compute_period_loops(const DoubleCover& cover);
Lattice compute_periods(const DoubleCover& cover);

struct AbelResult {
    cd value;
    IntegrationPath path;
    bool detour = false;
};

/// Abel integral from `base` to `target` (either may not be at x = inf for
/// the base). Straight route first; if the end sheet is wrong, a loop around
/// q[0] is inserted at the start. Throws SheetMismatch if that fails too.
AbelResult abel_integral(const DoubleCover& cover, const SheetedPoint& base, const SheetedPoint& target);
cd abel_to_point(const DoubleCover& cover, const SheetedPoint& base, const SheetedPoint& target);
cd abel_to_infinity(const DoubleCover& cover, const SheetedPoint& base, const SheetedPoint& target);

/// Independent Abel integrals, run with OpenMP when `parallel` is set.
std::vector<AbelResult> abel_batch(const DoubleCover& cover, const SheetedPoint& base,
                                   const std::vector<SheetedPoint>& targets, bool parallel);

/// Reference implementation of abel_batch: a plain loop.
std::vector<AbelResult> abel_batch_serial(const DoubleCover& cover, const SheetedPoint& base,
                                          const std::vector<SheetedPoint>& targets);

}  // namespace qrt
