#pragma once

#include <cstdint>

#include "qrt/qrt_map.hpp"

namespace qrt {

/// Delta(x) = c0 + c1 x + c2 x^2 + c3 x^3 + c4 x^4.
struct QuarticPoly {
    std::array<cd, 5> c{};

    cd operator()(cd x) const;
    /// x^4 Delta(1/x): the same quartic in the chart at x = infinity.
    QuarticPoly reversed() const;
    Poly as_poly() const { return Poly(std::vector<cd>(c.begin(), c.end())); }
    double scale() const;
};

struct EisensteinInvariants {
    cd g2;
    cd g3;
    cd delta;  // g2^3 - 27 g3^2
};

/// Two marked curve points p1 = (a1, b1), p2 = (a2, b2) and the Moebius change
///   rho(x, y) = ((x - a2)/(x - a1), (y - b2)/(y - b1))
/// sending p1 to (inf, inf) and p2 to (0, 0). A factor "(z - inf)" is read as
/// the constant 1, so a1 = inf, a2 = 0 gives the identity in x.
struct MoebiusPair {
    ProjCoord a1, b1, a2, b2;

    ProjPoint p1() const { return {a1, b1}; }
    ProjPoint p2() const { return {a2, b2}; }
    /// Throws InvalidInput unless a1 != a2 and b1 != b2.
    void validate() const;
};

ProjPoint apply_rho(const MoebiusPair& pair, const ProjPoint& p);
ProjPoint apply_rho_inv(const MoebiusPair& pair, const ProjPoint& p);

/// Discriminant of the curve as a quadratic in y. Throws NotBiquadraticInY
/// when every y^2 coefficient vanishes.
QuarticPoly partial_discriminant(const Biquadratic& curve);

EisensteinInvariants eisenstein_invariants(const QuarticPoly& q);

/// |Delta| relative threshold: singular when |Delta| < kSmoothTol * max|c_i|^6.
inline constexpr double kSmoothTol = 1e-8;

struct SmoothnessReport {
    bool smooth = false;
    EisensteinInvariants inv;
    double threshold = 0.0;
    bool biquadratic_in_y = true;
};

SmoothnessReport smoothness(const Biquadratic& curve);
bool is_smooth(const Biquadratic& curve);

/// Point `index` of a low-discrepancy (R2) sequence in the disc |z - centre| <= radius.
cd low_discrepancy_disc(std::uint64_t index, cd centre, double radius);

/// Seeded, deterministic search for an admissible marked pair (see
/// is_admissible_normalization). Throws ExhaustedSearch.
MoebiusPair choose_marked_points(const Biquadratic& curve, std::uint64_t seed);

struct NormalizedCurve {
    Biquadratic curve;  // a22 = a00 = 0
    MoebiusPair rho;
};

/// Coefficients of the curve in the rho-coordinates. The x^2y^2 and constant
/// coefficients are zeroed exactly. Throws DegenerateTransform if a21 or a12
/// vanish, InvalidInput if the marked points are not on the curve.
NormalizedCurve moebius_normalize(const Biquadratic& curve, const MoebiusPair& pair);

/// Guards the rest of the pipeline relies on: a21, a12, a20, a02, a10, a01
/// non-zero and the x-coordinates 0, x1', x2' of the marked targets away from
/// the branch points.
bool is_admissible_normalization(const Biquadratic& normalized);

/// Finite curve points over x with y-values from the quadratic P(x, .) = 0.
std::array<ProjCoord, 2> curve_ys(const Biquadratic& curve, cd x);

}  // namespace qrt
