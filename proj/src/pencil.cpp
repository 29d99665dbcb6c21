#include "qrt/pencil.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "qrt/errors.hpp"

namespace qrt {

namespace {

// 2x2 homogeneous matrix acting on [s : t].
struct Moebius2 {
    cd m00, m01, m10, m11;

    ProjCoord apply(const ProjCoord& z) const {
        const ProjCoord n = z.normalized();
        return ProjCoord::homogeneous(m00 * n.num() + m01 * n.den(), m10 * n.num() + m11 * n.den()).normalized();
    }
    Moebius2 adjugate() const { return {m11, -m01, -m10, m00}; }

    // Matrix T with (s^2, st, t^2)^T = T (s'^2, s't', t'^2)^T for (s, t) = M (s', t').
    Mat3 monomial_transform() const {
        const cd p = m00, q = m01, r = m10, w = m11;
        Mat3 t{};
        t[0] = {p * p, 2.0 * p * q, q * q};
        t[1] = {p * r, p * w + q * r, q * w};
        t[2] = {r * r, 2.0 * r * w, w * w};
        return t;
    }
};

// Row "z - a" in homogeneous form, with "z - inf" read as 1.
std::pair<cd, cd> linear_factor(const ProjCoord& a) {
    const ProjCoord n = a.normalized();
    if (n.is_infinite()) return {0.0, 1.0};
    return {1.0, -n.value()};
}

Moebius2 rho_matrix(const ProjCoord& marked1, const ProjCoord& marked2) {
    const auto [n0, n1] = linear_factor(marked2);
    const auto [d0, d1] = linear_factor(marked1);
    return {n0, n1, d0, d1};
}

Mat3 mat_mul(const Mat3& a, const Mat3& b) {
    Mat3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
    return r;
}

Mat3 transpose(const Mat3& a) {
    Mat3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i][j] = a[j][i];
    return r;
}

}  // namespace

// R2 low-discrepancy sequence mapped to a disc.
cd low_discrepancy_disc(std::uint64_t index, cd centre, double radius) {
    constexpr double g = 1.32471795724474602596;
    const double a1 = 1.0 / g;
    const double a2 = 1.0 / (g * g);
    const double u = std::fmod(0.5 + a1 * static_cast<double>(index), 1.0);
    const double v = std::fmod(0.5 + a2 * static_cast<double>(index), 1.0);
    return centre + std::polar(radius * std::sqrt(u), 2.0 * M_PI * v);
}

cd QuarticPoly::operator()(cd x) const {
    return (((c[4] * x + c[3]) * x + c[2]) * x + c[1]) * x + c[0];
}

QuarticPoly QuarticPoly::reversed() const {
    return QuarticPoly{{c[4], c[3], c[2], c[1], c[0]}};
}

double QuarticPoly::scale() const {
    double s = 0.0;
    for (const auto& v : c) s = std::max(s, std::abs(v));
    return s;
}

void MoebiusPair::validate() const {
    if (chordal(a1, a2) < 1e-12 || chordal(b1, b2) < 1e-12) {
        throw Error(ErrorKind::InvalidInput, "MoebiusPair: marked points must have a1 != a2 and b1 != b2");
    }
}

ProjPoint apply_rho(const MoebiusPair& pair, const ProjPoint& p) {
    return {rho_matrix(pair.a1, pair.a2).apply(p.x), rho_matrix(pair.b1, pair.b2).apply(p.y)};
}

ProjPoint apply_rho_inv(const MoebiusPair& pair, const ProjPoint& p) {
    return {rho_matrix(pair.a1, pair.a2).adjugate().apply(p.x), rho_matrix(pair.b1, pair.b2).adjugate().apply(p.y)};
}

QuarticPoly partial_discriminant(const Biquadratic& curve) {
    const Poly y2 = curve.y_coeff(2);
    if (y2.max_coeff() == 0.0) {
        throw Error(ErrorKind::NotBiquadraticInY, "partial_discriminant: curve has no y^2 terms");
    }
    const Poly d = curve.y_coeff(1) * curve.y_coeff(1) - cd(4.0) * (y2 * curve.y_coeff(0));
    QuarticPoly q;
    for (int k = 0; k < 5 && k <= d.degree(); ++k) q.c[k] = d.c[k];
    return q;
}

EisensteinInvariants eisenstein_invariants(const QuarticPoly& q) {
    const auto& [c0, c1, c2, c3, c4] = q.c;
    EisensteinInvariants inv;
    inv.g2 = c0 * c4 - c1 * c3 / 4.0 + c2 * c2 / 12.0;
    inv.g3 = -(c0 * c3 * c3 / 16.0 + c1 * c1 * c4 / 16.0 - c0 * c2 * c4 / 6.0 - c1 * c2 * c3 / 48.0 +
               c2 * c2 * c2 / 216.0);
    inv.delta = inv.g2 * inv.g2 * inv.g2 - 27.0 * inv.g3 * inv.g3;
    return inv;
}

SmoothnessReport smoothness(const Biquadratic& curve) {
    SmoothnessReport rep;
    QuarticPoly q;
    try {
        q = partial_discriminant(curve);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotBiquadraticInY) throw;
        // No y^2 terms: the line y = inf is a component, so the curve is reducible.
        rep.biquadratic_in_y = false;
        return rep;
    }
    rep.inv = eisenstein_invariants(q);
    const double s = q.scale();
    rep.threshold = kSmoothTol * std::pow(s, 6);
    rep.smooth = s > 0.0 && std::abs(rep.inv.delta) >= rep.threshold;
    return rep;
}

bool is_smooth(const Biquadratic& curve) { return smoothness(curve).smooth; }

std::array<ProjCoord, 2> curve_ys(const Biquadratic& curve, cd x) {
    return quadratic_roots(curve.y_coeff(2)(x), curve.y_coeff(1)(x), curve.y_coeff(0)(x));
}

NormalizedCurve moebius_normalize(const Biquadratic& curve, const MoebiusPair& pair) {
    pair.validate();
    const double scale = curve.scale();
    if (std::abs(curve.eval(pair.p1())) > 1e-10 * scale || std::abs(curve.eval(pair.p2())) > 1e-10 * scale) {
        throw Error(ErrorKind::InvalidInput, "moebius_normalize: marked points are not on the curve");
    }
    // P(rho^{-1}(x~, y~)) with rho^{-1} given by the adjugate matrices.
    const Mat3 tx = rho_matrix(pair.a1, pair.a2).adjugate().monomial_transform();
    const Mat3 ty = rho_matrix(pair.b1, pair.b2).adjugate().monomial_transform();
    NormalizedCurve out;
    out.rho = pair;
    out.curve.c = mat_mul(mat_mul(transpose(tx), curve.c), ty);
    const double nscale = out.curve.scale();
    // Residuals of order 1e-12 are the marked points' own rounding.
    if (std::abs(out.curve.c[0][0]) > 1e-9 * nscale || std::abs(out.curve.c[2][2]) > 1e-9 * nscale) {
        throw Error(ErrorKind::InvalidInput, "moebius_normalize: marked points are not on the curve");
    }
    out.curve.c[0][0] = 0.0;
    out.curve.c[2][2] = 0.0;
    const double guard = 1e-10 * nscale;
    if (std::abs(out.curve.a(2, 1)) <= guard || std::abs(out.curve.a(1, 2)) <= guard) {
        throw Error(ErrorKind::DegenerateTransform,
                    "moebius_normalize: a21 or a12 vanishes (a marked coordinate is a branch value)");
    }
    return out;
}

bool is_admissible_normalization(const Biquadratic& n) {
    const double guard = 1e-6 * n.scale();
    for (auto [i, j] : {std::pair{2, 1}, {1, 2}, {2, 0}, {0, 2}, {1, 0}, {0, 1}}) {
        if (std::abs(n.a(i, j)) <= guard) return false;
    }
    const QuarticPoly q = partial_discriminant(n);
    const RootSet rs = poly_roots(std::span<const cd>(q.c.data(), 5));
    if (rs.at_infinity > 0 || rs.finite.size() != 4) return false;
    double diam = 0.0;
    for (const cd& a : rs.finite)
        for (const cd& b : rs.finite) diam = std::max(diam, std::abs(a - b));
    const cd x1p = -n.a(0, 2) / n.a(1, 2);
    const cd x2p = -n.a(1, 0) / n.a(2, 0);
    for (const cd& x : {cd(0.0), x1p, x2p}) {
        for (const cd& r : rs.finite) {
            if (std::abs(x - r) < 1e-3 * diam) return false;
        }
    }
    return true;
}

MoebiusPair choose_marked_points(const Biquadratic& curve, std::uint64_t seed) {
    constexpr int kMaxTrials = 256;
    cd centre = 0.0;
    try {
        const QuarticPoly q = partial_discriminant(curve);
        const RootSet rs = poly_roots(std::span<const cd>(q.c.data(), 5));
        for (const cd& r : rs.finite) centre += r;
        if (!rs.finite.empty()) centre /= static_cast<double>(rs.finite.size());
    } catch (const Error&) {
    }
    const std::uint64_t base = seed * 1000003ULL;
    auto sample_point = [&](std::uint64_t idx) -> std::optional<ProjPoint> {
        const cd x = low_discrepancy_disc(base + idx, centre, 2.0);
        const auto ys = curve_ys(curve, x);
        const ProjCoord& y = ys[idx % 2];
        if (!y.is_finite() || y.near_infinite(1e-8)) return std::nullopt;
        return ProjPoint{ProjCoord(x), ProjCoord(y.value())};
    };
    for (int k = 0; k < kMaxTrials; ++k) {
        const auto p1 = sample_point(2 * k);
        const auto p2 = sample_point(2 * k + 1);
        if (!p1 || !p2) continue;
        MoebiusPair pair{p1->x, p1->y, p2->x, p2->y};
        if (chordal(pair.a1, pair.a2) < 1e-6 || chordal(pair.b1, pair.b2) < 1e-6) continue;
        try {
            const NormalizedCurve n = moebius_normalize(curve, pair);
            if (is_admissible_normalization(n.curve)) return pair;
        } catch (const Error&) {
        }
    }
    throw Error(ErrorKind::ExhaustedSearch, "choose_marked_points: no admissible pair found");
}

}  // namespace qrt
