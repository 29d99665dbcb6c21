#pragma once

#include <array>

#include "qrt/proj.hpp"

namespace qrt {

/// Period lattice Z w1 + Z w2 with Im(w2/w1) > 0, its modulus tau = w2/w1,
/// nome q = exp(i pi tau) and the quasi-period constants eta_j = zeta(w_j/2).
struct Lattice {
    cd w1, w2;
    cd tau, q_nome;
    cd eta1, eta2;
    /// Integer matrix {a, b, c, d} with (w1, w2) = (a w1_in + b w2_in, c w1_in + d w2_in).
    std::array<int, 4> basis_change{1, 0, 0, 1};

    /// Real coordinates (a, b) with u = a w1 + b w2.
    std::array<double, 2> coordinates(cd u) const;
    /// u - m w1 - n w2 with the coordinates of the result in [-1/2, 1/2).
    cd reduce(cd u, int* m = nullptr, int* n = nullptr) const;
    /// |reduce(u)|: distance from u to the nearest lattice point in the
    /// fundamental-parallelogram sense.
    double residual(cd u) const { return std::abs(reduce(u)); }
};

/// Builds a lattice from two periods: Gauss-reduces the basis, orients it so
/// that Im(w2/w1) > 0 (negating w2 if needed) and fills in eta1, eta2.
/// Throws DegenerateLattice if w1, w2 are R-linearly dependent.
Lattice make_lattice(cd w1, cd w2);

/// Quasi-period constants: eta1 = -pi^2 theta1'''(0) / (6 w1 theta1'(0)) and
/// eta2 from the Legendre relation eta1 w2 - eta2 w1 = i pi.
std::array<cd, 2> eta_constants(cd w1, cd w2);

/// Odd Jacobi theta function 2 sum (-1)^n q^((n+1/2)^2) sin((2n+1) z),
/// q = exp(i pi tau). z is reduced modulo pi and pi tau first.
cd theta1(cd z, cd tau);

/// theta1'(0) and theta1'''(0) by their q-series.
std::array<cd, 2> theta1_derivatives_at_zero(cd tau);

/// Lattice invariants g2 = 60 sum' L^-4, g3 = 140 sum' L^-6, evaluated via the
/// q-expansions of the normalized Eisenstein series E4, E6.
std::array<cd, 2> lattice_invariants_eisenstein(const Lattice& lat);

/// value = mantissa * exp(exponent); keeps sigma ratios finite for large |u|.
struct Scaled {
    cd mantissa;
    cd exponent;
    cd value() const { return mantissa * std::exp(exponent); }
};

/// Weierstrass sigma through its theta-function representation. Immutable
/// once built; all evaluation methods are const and thread-safe.
class SigmaEvaluator {
public:
    explicit SigmaEvaluator(Lattice lat);

    const Lattice& lattice() const { return lat_; }

    /// theta1(z | w2/w1) for this lattice.
    cd theta(cd z) const;
    Scaled sigma_scaled(cd u) const;
    cd sigma(cd u) const { return sigma_scaled(u).value(); }

private:
    cd theta_series(cd z) const;

    Lattice lat_;
    cd prefactor_;   // (w1/pi) (1/2) q^(-1/4) prod (1 - q^(2n))^(-3)
    cd eta_over_w_;  // eta1 / w1
};

/// F(u) = [u-alpha][u-beta] / ([u-gamma][u-delta]) with [.] = sigma, as a
/// homogeneous pair so that poles come out as infinity. Requires
/// alpha + beta = gamma + delta (InvalidInput otherwise).
ProjCoord F_factor_proj(cd u, cd alpha, cd beta, cd gamma, cd delta, const SigmaEvaluator& ev);
/// Finite value of F; throws PoleAtU when u is congruent to gamma or delta.
cd F_factor(cd u, cd alpha, cd beta, cd gamma, cd delta, const SigmaEvaluator& ev);

/// Torus points of the embedding (stored unreduced) and the two scale factors.
struct EmbeddingParams {
    cd e1, e2, hx, hy;
    cd c1{1.0}, c2{1.0};
};

/// F12(u) = [u-e2][u-hx+e2] / ([u-e1][u-hx+e1]).
ProjCoord F12(cd u, const EmbeddingParams& p, const SigmaEvaluator& ev);
/// G12(u) = [u-e2][u-hy+e2] / ([u-e1][u-hy+e1]).
ProjCoord G12(cd u, const EmbeddingParams& p, const SigmaEvaluator& ev);

}  // namespace qrt
