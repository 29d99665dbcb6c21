#pragma once

// Independent reference computations used only by the tests. None of these
// share code paths with the library beyond the basic types.

#include <array>
#include <complex>
#include <vector>

#include "qrt/problem_io.hpp"
#include "qrt/qrt_map.hpp"

namespace oracle {

using cd = std::complex<double>;

/// The two printed rational recurrences for phi1 and phi2 (finite points only).
std::array<cd, 2> phi1_step(cd x, cd y);
std::array<cd, 2> phi2_step(cd x, cd y);

qrt::QrtMap phi1_map();
qrt::QrtMap phi2_map();
/// (1, y0) with y0 the root of x^T A y = 0 over x = 1 nearest 0.437561+0.328195i.
qrt::ProjPoint phi_p0();

/// Determinant of the Sylvester matrix of two polynomials (ascending coefficients).
cd sylvester_resultant(const std::vector<cd>& a, const std::vector<cd>& b);

/// Weierstrass product u prod' (1 - u/w) exp(u/w + u^2/(2 w^2)) over
/// max(|m|, |n|) <= N.
cd sigma_product(cd u, cd w1, cd w2, int N);
/// Richardson extrapolation of sigma_product in 1/N^2 from N and 2N.
cd sigma_product_extrapolated(cd u, cd w1, cd w2, int N);

/// 60 sum' w^-4 and 140 sum' w^-6 over the box, extrapolated from N and 2N.
std::array<cd, 2> eisenstein_direct(cd w1, cd w2, int N);

/// 2 sum_{n=0}^{M} (-1)^n q^((n+1/2)^2) sin((2n+1) z), with no argument reduction.
cd theta1_direct(cd z, cd tau, int M);

/// Newton search for common zeros of P, P_x, P_y over CP1 x CP1 (all four
/// affine charts, grid of starts). Returns true when one is found.
bool has_singular_point(const qrt::Biquadratic& curve);

/// Chart-free evaluation of P at homogeneous coordinates [s:t], [u:v].
cd eval_homogeneous(const qrt::Biquadratic& c, cd s, cd t, cd u, cd v);

}  // namespace oracle
