#pragma once

#include <span>
#include <vector>

#include "qrt/proj.hpp"

namespace qrt {

/// Dense univariate polynomial with complex coefficients, ascending powers.
struct Poly {
    std::vector<cd> c;

    Poly() = default;
    Poly(std::vector<cd> coeffs) : c(std::move(coeffs)) {}

    int degree() const { return static_cast<int>(c.size()) - 1; }
    cd operator()(cd x) const;
    cd derivative(cd x) const;
    double max_coeff() const;
};

Poly operator+(const Poly& a, const Poly& b);
Poly operator-(const Poly& a, const Poly& b);
Poly operator*(const Poly& a, const Poly& b);
Poly operator*(cd s, const Poly& a);

/// Roots of a polynomial of nominal degree `coeffs.size()-1`.
/// Leading coefficients below `trim_tol * max|c|` are dropped and counted as
/// roots at infinity (the homogeneous polynomial vanishes at [1:0]).
struct RootSet {
    std::vector<cd> finite;
    int at_infinity = 0;
};

/// Companion-matrix eigenvalues followed by a Newton polish per root.
RootSet poly_roots(std::span<const cd> coeffs, double trim_tol = 1e-13);

/// Roots of a*z^2 + b*z + c as homogeneous pairs (handles a == 0 -> one root at infinity).
std::array<ProjCoord, 2> quadratic_roots(cd a, cd b, cd c);

}  // namespace qrt
