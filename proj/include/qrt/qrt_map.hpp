#pragma once

#include <vector>

#include "qrt/polynomial.hpp"
#include "qrt/proj.hpp"

namespace qrt {

/// A fixed biquadratic curve sum C[i][j] x^(2-i) y^(2-j) = 0, i.e. the
/// matrix form x^T C y with x = (x^2, x, 1), y = (y^2, y, 1). C[0][0] is the
/// x^2 y^2 coefficient. In the power notation a_ij x^i y^j used for the
/// normalized curve, a_ij = C[2-i][2-j].
struct Biquadratic {
    Mat3 c{};

    cd operator()(cd x, cd y) const;
    /// Evaluation at normalized homogeneous coordinates (valid at infinity).
    cd eval(const ProjPoint& p) const;

    /// Coefficient of y^k (k = 0, 1, 2) as a polynomial in x.
    Poly y_coeff(int k) const;
    /// Coefficient of x^k (k = 0, 1, 2) as a polynomial in y.
    Poly x_coeff(int k) const;

    /// a_ij in power notation (coefficient of x^i y^j).
    cd a(int i, int j) const { return c[2 - i][2 - j]; }

    Biquadratic transposed() const;
    double scale() const { return max_abs(c); }
};

/// The QRT map defined by the pencil x^T A y + K x^T B y = 0.
struct QrtMap {
    Mat3 A{};
    Mat3 B{};

    /// Throws InvalidInput when A, B are both zero or proportional.
    void validate() const;
};

/// x^T A y + K x^T B y at a finite point.
cd eval_pencil(const QrtMap& map, cd x, cd y, cd K);
/// Homogenized variant (normalized monomial vectors), valid at infinity.
cd eval_pencil(const QrtMap& map, const ProjPoint& p, cd K);

/// K0 with x^T A y + K0 x^T B y = 0 at p0. Throws InfiniteK when only the
/// B-term vanishes (the orbit lies on x^T B y = 0) and DegeneratePoint when
/// both vanish.
cd compute_K(const QrtMap& map, const ProjPoint& p0);

/// A + K0 B.
Biquadratic fix_curve(const QrtMap& map, cd K0);

/// Horizontal switch r_x: (x, y) -> (x', y), the other intersection of the
/// horizontal line through p with the pencil member through p.
ProjPoint horizontal_switch(const QrtMap& map, const ProjPoint& p);
/// Vertical switch r_y: (x, y) -> (x, y').
ProjPoint vertical_switch(const QrtMap& map, const ProjPoint& p);

/// One step of the map, r_y o r_x.
ProjPoint qrt_step(const QrtMap& map, const ProjPoint& p);
/// Inverse step, r_x o r_y.
ProjPoint qrt_step_inverse(const QrtMap& map, const ProjPoint& p);

struct BasePoint {
    ProjPoint point;
    int multiplicity = 1;
};

/// Base points of the pencil from the resultants f2^2 - f1 f3 (in y) and
/// g2^2 - g1 g3 (in x). Multiplicities come from root clustering.
std::vector<BasePoint> find_base_points(const QrtMap& map);

/// Residual max(|x^T A y|/|A|, |x^T B y|/|B|) at normalized homogeneous coordinates.
double base_point_residual(const QrtMap& map, const ProjPoint& p);

}  // namespace qrt
