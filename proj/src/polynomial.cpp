#include "qrt/polynomial.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "qrt/errors.hpp"

namespace qrt {

cd Poly::operator()(cd x) const {
    cd acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = acc * x + *it;
    }
    return acc;
}

cd Poly::derivative(cd x) const {
    cd acc = 0.0;
    for (int k = degree(); k >= 1; --k) {
        acc = acc * x + static_cast<double>(k) * c[k];
    }
    return acc;
}

double Poly::max_coeff() const {
    double m = 0.0;
    for (const auto& v : c) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

Poly operator+(const Poly& a, const Poly& b) {
    Poly r;
    r.c.assign(std::max(a.c.size(), b.c.size()), cd(0.0));
    for (std::size_t i = 0; i < a.c.size(); ++i) r.c[i] += a.c[i];
    for (std::size_t i = 0; i < b.c.size(); ++i) r.c[i] += b.c[i];
    return r;
}

Poly operator-(const Poly& a, const Poly& b) {
    return a + cd(-1.0) * b;
}

Poly operator*(const Poly& a, const Poly& b) {
    if (a.c.empty() || b.c.empty()) {
        return {};
    }
    Poly r;
    r.c.assign(a.c.size() + b.c.size() - 1, cd(0.0));
    for (std::size_t i = 0; i < a.c.size(); ++i) {
        for (std::size_t j = 0; j < b.c.size(); ++j) {
            r.c[i + j] += a.c[i] * b.c[j];
        }
    }
    return r;
}

Poly operator*(cd s, const Poly& a) {
    Poly r = a;
    for (auto& v : r.c) v *= s;
    return r;
}

RootSet poly_roots(std::span<const cd> coeffs, double trim_tol) {
    RootSet out;
    double scale = 0.0;
    for (const auto& v : coeffs) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) {
        throw Error(ErrorKind::InvalidInput, "poly_roots: zero polynomial");
    }
    int deg = static_cast<int>(coeffs.size()) - 1;
    while (deg > 0 && std::abs(coeffs[deg]) <= trim_tol * scale) {
        --deg;
        ++out.at_infinity;
    }
    if (deg <= 0) {
        return out;
    }
    const cd lead = coeffs[deg];
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) {
        companion(i, i - 1) = 1.0;
    }
    for (int i = 0; i < deg; ++i) {
        companion(i, deg - 1) = -coeffs[i] / lead;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    const Poly p(std::vector<cd>(coeffs.begin(), coeffs.begin() + deg + 1));
    for (int i = 0; i < deg; ++i) {
        cd z = solver.eigenvalues()[i];
        double res = std::abs(p(z));
        for (int it = 0; it < 8; ++it) {
            const cd d = p.derivative(z);
            if (d == cd(0.0)) break;
            const cd z_new = z - p(z) / d;
            const double res_new = std::abs(p(z_new));
            if (!(res_new < res)) break;
            z = z_new;
            res = res_new;
        }
        out.finite.push_back(z);
    }
    return out;
}

std::array<ProjCoord, 2> quadratic_roots(cd a, cd b, cd c) {
    // Homogeneous form a s^2 + b s t + c t^2; pick the cancellation-free branch.
    const cd disc = std::sqrt(b * b - 4.0 * a * c);
    const cd q = (std::real(std::conj(b) * disc) >= 0.0) ? -0.5 * (b + disc) : -0.5 * (b - disc);
    if (q == cd(0.0)) {
        // b == 0 and a*c == 0
        if (a == cd(0.0) && c == cd(0.0)) {
            throw Error(ErrorKind::InvalidInput, "quadratic_roots: zero quadratic");
        }
        if (a == cd(0.0)) return {ProjCoord::infinity(), ProjCoord::infinity()};
        return {ProjCoord(0.0), ProjCoord(0.0)};
    }
    // roots: q/a and c/q
    return {ProjCoord::homogeneous(q, a), ProjCoord::homogeneous(c, q)};
}

}  // namespace qrt
