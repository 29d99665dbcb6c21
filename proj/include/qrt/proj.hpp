#pragma once

#include <array>
#include <complex>
#include <string>

namespace qrt {

using cd = std::complex<double>;
using Mat3 = std::array<std::array<cd, 3>, 3>;

/// A point of CP^1 held as a homogeneous pair [num : den]; value = num / den.
/// The pair is rescaled lazily (only by normalized()), so arithmetic on it is
/// exact projective arithmetic and infinity needs no special casing.
class ProjCoord {
public:
    ProjCoord() = default;
    ProjCoord(cd value) : num_(value), den_(1.0) {}
    ProjCoord(double value) : num_(value), den_(1.0) {}

    static ProjCoord homogeneous(cd num, cd den) { return ProjCoord(num, den); }
    static ProjCoord infinity() { return ProjCoord(cd(1.0), cd(0.0)); }

    cd num() const { return num_; }
    cd den() const { return den_; }

    bool is_infinite() const { return den_ == cd(0.0); }
    /// True when |den| <= tol * |num|, i.e. the point is within chordal
    /// distance ~tol of infinity.
    bool near_infinite(double tol = 1e-12) const { return std::abs(den_) <= tol * std::abs(num_); }
    bool is_finite() const { return !is_infinite(); }

    /// Finite value; infinity yields a complex infinity.
    cd value() const;

    /// Same point with max(|num|, |den|) == 1.
    ProjCoord normalized() const;

    /// Homogeneous monomial vector (s^2, s t, t^2) of the normalized pair,
    /// matching the (x^2, x, 1) convention of the coefficient matrices.
    std::array<cd, 3> monomials() const;

private:
    ProjCoord(cd num, cd den) : num_(num), den_(den) {}
    cd num_{0.0};
    cd den_{1.0};
};

struct ProjPoint {
    ProjCoord x;
    ProjCoord y;
};

/// Chordal distance on CP^1: |z0 w1 - z1 w0| / (|z| |w|), bounded by 1.
double chordal(const ProjCoord& a, const ProjCoord& b);
/// Max of the componentwise chordal distances on CP^1 x CP^1.
double chordal(const ProjPoint& a, const ProjPoint& b);

/// "a+bi" with `digits` significant digits; "inf" for the point at infinity.
std::string format_complex(cd z, int digits = 6);
std::string format_coord(const ProjCoord& c, int digits = 6);

double max_abs(const Mat3& m);

}  // namespace qrt
