#include "qrt/elliptic.hpp"

#include <algorithm>
#include <cmath>

#include "qrt/errors.hpp"

namespace qrt {

namespace {

constexpr cd kI{0.0, 1.0};
constexpr int kMaxThetaTerms = 400;

cd theta_series_impl(cd z, cd tau) {
    cd sum = 0.0;
    double max_term = 0.0;
    const double im_tau = tau.imag();
    const double im_z = std::abs(z.imag());
    for (int n = 0; n < kMaxThetaTerms; ++n) {
        const double h = n + 0.5;
        const cd term = ((n % 2) ? -1.0 : 1.0) * std::exp(kI * M_PI * tau * (h * h)) *
                        std::sin(static_cast<double>(2 * n + 1) * z);
        sum += term;
        max_term = std::max(max_term, std::abs(term));
        const double hn = n + 1.5;
        const double next_bound = std::exp(-M_PI * im_tau * hn * hn) * std::cosh((2.0 * n + 3.0) * im_z);
        if (n >= 1 && next_bound < 1e-17 * std::max(std::abs(sum), max_term)) break;
    }
    return 2.0 * sum;
}

void require_upper_half_plane(cd tau) {
    if (!(tau.imag() > 0.0)) {
        throw Error(ErrorKind::TauNotInUpperHalfPlane, "theta1: Im(tau) must be positive");
    }
}

}  // namespace

std::array<double, 2> Lattice::coordinates(cd u) const {
    const double det = w1.real() * w2.imag() - w2.real() * w1.imag();
    const double a = (u.real() * w2.imag() - w2.real() * u.imag()) / det;
    const double b = (w1.real() * u.imag() - u.real() * w1.imag()) / det;
    return {a, b};
}

cd Lattice::reduce(cd u, int* m, int* n) const {
    const auto [a, b] = coordinates(u);
    const double fm = std::floor(a + 0.5);
    const double fn = std::floor(b + 0.5);
    if (m) *m = static_cast<int>(fm);
    if (n) *n = static_cast<int>(fn);
    return u - fm * w1 - fn * w2;
}

std::array<cd, 2> theta1_derivatives_at_zero(cd tau) {
    require_upper_half_plane(tau);
    cd d1 = 0.0, d3 = 0.0;
    for (int n = 0; n < kMaxThetaTerms; ++n) {
        const double h = n + 0.5;
        const double k = 2.0 * n + 1.0;
        const cd qp = ((n % 2) ? -1.0 : 1.0) * std::exp(kI * M_PI * tau * (h * h));
        d1 += qp * k;
        d3 += qp * k * k * k;
        if (n >= 1 && std::abs(qp) * k * k * k < 1e-18 * std::abs(d3)) break;
    }
    return {2.0 * d1, -2.0 * d3};
}

std::array<cd, 2> eta_constants(cd w1, cd w2) {
    if (w1 == cd(0.0)) throw Error(ErrorKind::DegenerateLattice, "eta_constants: zero period");
    cd tau = w2 / w1;
    if (std::abs(tau.imag()) <= 1e-12 * std::abs(tau)) {
        throw Error(ErrorKind::DegenerateLattice, "eta_constants: periods are linearly dependent over R");
    }
    const double orientation = tau.imag() > 0.0 ? 1.0 : -1.0;
    if (orientation < 0.0) tau = -tau;  // same lattice, eta1 only depends on w1
    const auto [t1, t3] = theta1_derivatives_at_zero(tau);
    const cd eta1 = -M_PI * M_PI * t3 / (6.0 * w1 * t1);
    const cd eta2 = (eta1 * w2 - orientation * kI * M_PI) / w1;
    return {eta1, eta2};
}

Lattice make_lattice(cd w1, cd w2) {
    if (w1 == cd(0.0) || w2 == cd(0.0) || std::abs((w2 / w1).imag()) <= 1e-12 * std::abs(w2 / w1)) {
        throw Error(ErrorKind::DegenerateLattice, "make_lattice: periods are linearly dependent over R");
    }
    // Gauss reduction, tracking the integer change of basis.
    cd b1 = w1, b2 = w2;
    std::array<long, 4> m{1, 0, 0, 1};
    for (int guard = 0; guard < 1000; ++guard) {
        if (std::abs(b2) < std::abs(b1)) {
            std::swap(b1, b2);
            std::swap(m[0], m[2]);
            std::swap(m[1], m[3]);
        }
        const double mu = std::real(b2 * std::conj(b1)) / std::norm(b1);
        const long k = std::lround(mu);
        if (k == 0) break;
        b2 -= static_cast<double>(k) * b1;
        m[2] -= k * m[0];
        m[3] -= k * m[1];
    }
    if ((b2 / b1).imag() < 0.0) {
        b2 = -b2;
        m[2] = -m[2];
        m[3] = -m[3];
    }
    Lattice lat;
    lat.w1 = b1;
    lat.w2 = b2;
    lat.tau = b2 / b1;
    lat.q_nome = std::exp(kI * M_PI * lat.tau);
    const auto eta = eta_constants(b1, b2);
    lat.eta1 = eta[0];
    lat.eta2 = eta[1];
    lat.basis_change = {static_cast<int>(m[0]), static_cast<int>(m[1]), static_cast<int>(m[2]),
                        static_cast<int>(m[3])};
    return lat;
}

cd theta1(cd z, cd tau) {
    require_upper_half_plane(tau);
    // z = z'' + m pi + n pi tau; theta(z) = (-1)^(m+n) exp(-i pi tau n^2 - 2 i n z'') theta(z'').
    const double n = std::round(z.imag() / (M_PI * tau.imag()));
    const cd z1 = z - n * M_PI * tau;
    const double m = std::round(z1.real() / M_PI);
    const cd z2 = z1 - m * M_PI;
    const double sign = (static_cast<long long>(m + n) % 2 == 0) ? 1.0 : -1.0;
    return sign * std::exp(-kI * M_PI * tau * (n * n) - 2.0 * kI * n * z2) * theta_series_impl(z2, tau);
}

std::array<cd, 2> lattice_invariants_eisenstein(const Lattice& lat) {
    const Lattice red = make_lattice(lat.w1, lat.w2);
    const cd qq = std::exp(2.0 * kI * M_PI * red.tau);
    cd s3 = 0.0, s5 = 0.0;
    cd qk = 1.0;
    for (int k = 1; k < 2000; ++k) {
        qk *= qq;
        double sig3 = 0.0, sig5 = 0.0;
        for (int d = 1; d <= k; ++d) {
            if (k % d == 0) {
                const double dd = d;
                sig3 += dd * dd * dd;
                sig5 += dd * dd * dd * dd * dd;
            }
        }
        s3 += sig3 * qk;
        s5 += sig5 * qk;
        if (std::abs(qk) * sig5 < 1e-18) break;
    }
    const cd e4 = 1.0 + 240.0 * s3;
    const cd e6 = 1.0 - 504.0 * s5;
    const double pi4 = std::pow(M_PI, 4), pi6 = std::pow(M_PI, 6);
    const cd g2 = (4.0 * pi4 / 3.0) * e4 / std::pow(red.w1, 4);
    const cd g3 = (8.0 * pi6 / 27.0) * e6 / std::pow(red.w1, 6);
    return {g2, g3};
}

SigmaEvaluator::SigmaEvaluator(Lattice lat) : lat_(lat) {
    require_upper_half_plane(lat_.tau);
    if (!(std::abs(lat_.q_nome) < 1.0)) {
        throw Error(ErrorKind::DegenerateLattice, "SigmaEvaluator: |q| must be < 1");
    }
    cd prod = 1.0;
    const cd q2 = lat_.q_nome * lat_.q_nome;
    cd qn = 1.0;
    for (int n = 1; n < 10000; ++n) {
        qn *= q2;
        prod *= 1.0 - qn;
        if (std::abs(qn) < 1e-18) break;
    }
    prefactor_ = (lat_.w1 / M_PI) * 0.5 * std::exp(-kI * M_PI * lat_.tau / 4.0) / (prod * prod * prod);
    eta_over_w_ = lat_.eta1 / lat_.w1;
}

cd SigmaEvaluator::theta(cd z) const { return theta1(z, lat_.tau); }

cd SigmaEvaluator::theta_series(cd z) const { return theta_series_impl(z, lat_.tau); }

Scaled SigmaEvaluator::sigma_scaled(cd u) const {
    int m = 0, n = 0;
    const cd v = lat_.reduce(u, &m, &n);
    const cd L = static_cast<double>(m) * lat_.w1 + static_cast<double>(n) * lat_.w2;
    const double sign = ((m + n + m * n) & 1) ? -1.0 : 1.0;
    Scaled s;
    s.mantissa = sign * prefactor_ * theta_series(M_PI * v / lat_.w1);
    s.exponent = eta_over_w_ * v * v +
                 2.0 * (static_cast<double>(m) * lat_.eta1 + static_cast<double>(n) * lat_.eta2) * (v + 0.5 * L);
    return s;
}

ProjCoord F_factor_proj(cd u, cd alpha, cd beta, cd gamma, cd delta, const SigmaEvaluator& ev) {
    const double scale = std::abs(alpha) + std::abs(beta) + std::abs(gamma) + std::abs(delta) + std::abs(ev.lattice().w1);
    if (std::abs(alpha + beta - gamma - delta) > 1e-10 * scale) {
        throw Error(ErrorKind::InvalidInput, "F_factor: requires alpha + beta = gamma + delta");
    }
    const cd ur = ev.lattice().reduce(u);
    // Arguments on the lattice give exact zeros, so poles come out as infinity.
    const double tol = 1e-12 * std::abs(ev.lattice().w1);
    auto sig = [&](cd v) {
        return ev.lattice().residual(v) < tol ? Scaled{0.0, 0.0} : ev.sigma_scaled(v);
    };
    const Scaled sa = sig(ur - alpha);
    const Scaled sb = sig(ur - beta);
    const Scaled sc = sig(ur - gamma);
    const Scaled sd = sig(ur - delta);
    const cd e = sa.exponent + sb.exponent - sc.exponent - sd.exponent;
    return ProjCoord::homogeneous(sa.mantissa * sb.mantissa * std::exp(e), sc.mantissa * sd.mantissa).normalized();
}

cd F_factor(cd u, cd alpha, cd beta, cd gamma, cd delta, const SigmaEvaluator& ev) {
    const double tol = 1e-12 * std::abs(ev.lattice().w1);
    if (ev.lattice().residual(u - gamma) < tol || ev.lattice().residual(u - delta) < tol) {
        throw Error(ErrorKind::PoleAtU, "F_factor: u is congruent to a pole");
    }
    return F_factor_proj(u, alpha, beta, gamma, delta, ev).value();
}

ProjCoord F12(cd u, const EmbeddingParams& p, const SigmaEvaluator& ev) {
    return F_factor_proj(u, p.e2, p.hx - p.e2, p.e1, p.hx - p.e1, ev);
}

ProjCoord G12(cd u, const EmbeddingParams& p, const SigmaEvaluator& ev) {
    return F_factor_proj(u, p.e2, p.hy - p.e2, p.e1, p.hy - p.e1, ev);
}

}  // namespace qrt
