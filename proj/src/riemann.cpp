#include "qrt/riemann.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "qrt/errors.hpp"

namespace qrt {

namespace {

constexpr int kArcSteps = 32;          // polyline steps per full turn
constexpr int kInitialPieces = 64;     // initial subdivision of a segment
constexpr double kMinPieceFraction = 1.0 / (1 << 20);
constexpr double kQuadRelTol = 1e-11;

struct GaussRule {
    std::vector<double> x, w;
};

GaussRule gauss_legendre(int n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-16) break;
        }
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    return r;
}

const GaussRule& rule_lo() {
    static const GaussRule r = gauss_legendre(10);
    return r;
}
const GaussRule& rule_hi() {
    static const GaussRule r = gauss_legendre(20);
    return r;
}

// Picks the root of D(x) closest to the reference branch value; false if the
// choice is ambiguous (candidates differ by less than 10x the drift).
bool continue_sqrt(cd delta_value, cd s_ref, cd& out) {
    const cd c = std::sqrt(delta_value);
    const double dp = std::abs(c - s_ref);
    const double dm = std::abs(c + s_ref);
    out = dp <= dm ? c : -c;
    return 10.0 * std::min(dp, dm) <= 2.0 * std::abs(c);
}

struct PieceResult {
    cd value;
    cd s_end;
};

// Integrates sign * dz / s(z) over [a, b] with s^2 = D(z), s(a) = s_a.
PieceResult integrate_piece(const QuarticPoly& D, cd a, cd b, cd s_a, double sign, double min_len) {
    const cd half = 0.5 * (b - a);
    const cd mid = 0.5 * (a + b);
    bool ok = true;
    cd s_b;
    ok = continue_sqrt(D(b), s_a, s_b) && ok;
    auto apply = [&](const GaussRule& r, double& fmax) {
        cd acc = 0.0;
        for (std::size_t k = 0; k < r.x.size(); ++k) {
            cd s;
            ok = continue_sqrt(D(mid + half * r.x[k]), s_a, s) && ok;
            const cd f = 1.0 / s;
            fmax = std::max(fmax, std::abs(f));
            acc += r.w[k] * f;
        }
        return sign * half * acc;
    };
    double fmax = 0.0;
    const cd lo = apply(rule_lo(), fmax);
    const cd hi = apply(rule_hi(), fmax);
    const double err = std::abs(hi - lo);
    if (ok && std::isfinite(err) && err <= kQuadRelTol * std::abs(hi) + 1e-14 * std::abs(b - a) * fmax) {
        return {hi, s_b};
    }
    if (std::abs(b - a) < min_len) {
        throw Error(ErrorKind::StepCollapse, "track_integral: cannot follow the square-root branch (step collapsed)");
    }
    const PieceResult left = integrate_piece(D, a, mid, s_a, sign, min_len);
    const PieceResult right = integrate_piece(D, mid, b, left.s_end, sign, min_len);
    return {left.value + right.value, right.s_end};
}

PieceResult integrate_segment(const QuarticPoly& D, cd a, cd b, cd s_a, double sign) {
    const double len = std::abs(b - a);
    if (len == 0.0) return {0.0, s_a};
    const double min_len = len * kMinPieceFraction;
    cd total = 0.0;
    cd s = s_a;
    for (int k = 0; k < kInitialPieces; ++k) {
        const cd pa = a + (b - a) * (static_cast<double>(k) / kInitialPieces);
        const cd pb = (k + 1 == kInitialPieces) ? b : a + (b - a) * (static_cast<double>(k + 1) / kInitialPieces);
        const PieceResult r = integrate_piece(D, pa, pb, s, sign, min_len);
        total += r.value;
        s = r.s_end;
    }
    return {total, s};
}

double segment_distance(cd p, cd a, cd b) {
    const cd d = b - a;
    const double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(p - a);
    const double t = std::clamp(std::real((p - a) * std::conj(d)) / len2, 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

double cross2(cd a, cd b) { return a.real() * b.imag() - a.imag() * b.real(); }

bool segments_intersect(cd p1, cd p2, cd p3, cd p4) {
    const double d1 = cross2(p4 - p3, p1 - p3);
    const double d2 = cross2(p4 - p3, p2 - p3);
    const double d3 = cross2(p2 - p1, p3 - p1);
    const double d4 = cross2(p2 - p1, p4 - p1);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

double pair_clearance(const std::array<cd, 4>& q, int i, int j) {
    double c = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 4; ++k) {
        if (k != i && k != j) c = std::min(c, segment_distance(q[k], q[i], q[j]));
    }
    return c;
}

bool same_sheet(cd s, cd t, double abs_floor) {
    const double scale = std::max(std::abs(s), std::abs(t));
    return std::abs(s - t) <= 1e-6 * scale + abs_floor;
}

}  // namespace

BranchData branch_points(const QuarticPoly& quartic) {
    const double scale = quartic.scale();
    if (scale == 0.0 || std::abs(quartic.c[4]) <= 1e-12 * scale) {
        throw Error(ErrorKind::DegenerateQuartic, "branch_points: leading coefficient vanishes");
    }
    const RootSet rs = poly_roots(std::span<const cd>(quartic.c.data(), 5), 0.0);
    if (rs.finite.size() != 4) {
        throw Error(ErrorKind::DegenerateQuartic, "branch_points: expected four finite roots");
    }
    BranchData b;
    b.quartic = quartic;
    b.leading = quartic.c[4];
    std::copy(rs.finite.begin(), rs.finite.end(), b.q.begin());
    std::sort(b.q.begin(), b.q.end(), [](cd u, cd v) {
        return u.real() != v.real() ? u.real() < v.real() : u.imag() < v.imag();
    });
    double min_pair = std::numeric_limits<double>::infinity();
    double max_mod = 0.0;
    for (int i = 0; i < 4; ++i) {
        max_mod = std::max(max_mod, std::abs(b.q[i]));
        for (int j = i + 1; j < 4; ++j) {
            min_pair = std::min(min_pair, std::abs(b.q[i] - b.q[j]));
            b.diameter = std::max(b.diameter, std::abs(b.q[i] - b.q[j]));
        }
    }
    if (min_pair <= 1e-6 * std::max(max_mod, 1e-300)) {
        throw Error(ErrorKind::DegenerateQuartic, "branch_points: roots collide");
    }
    const std::array<std::array<std::array<int, 2>, 2>, 3> pairings{{
        {{{0, 1}, {2, 3}}}, {{{0, 2}, {1, 3}}}, {{{0, 3}, {1, 2}}},
    }};
    b.cuts = pairings[0];
    for (const auto& p : pairings) {
        if (!segments_intersect(b.q[p[0][0]], b.q[p[0][1]], b.q[p[1][0]], b.q[p[1][1]])) {
            b.cuts = p;
            break;
        }
    }
    // First chain (lexicographic) whose loops clear the other branch points
    // comfortably, otherwise the best available.
    double best = -1.0;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            for (int k = 0; k < 4; ++k) {
                if (i == j || j == k || i == k) continue;
                const double c = std::min(pair_clearance(b.q, i, j), pair_clearance(b.q, j, k));
                if (c > best) {
                    best = c;
                    b.chain = {i, j, k};
                }
                if (c >= 0.25 * min_pair) {
                    best = c;
                    b.chain = {i, j, k};
                    goto chosen;
                }
            }
        }
    }
chosen:
    b.margin = std::min({0.05 * b.diameter, 0.2 * min_pair, 0.4 * best});
    return b;
}

std::array<cd, 2> y_branches(const Biquadratic& curve, cd x) {
    const cd y2 = curve.y_coeff(2)(x);
    const cd y1 = curve.y_coeff(1)(x);
    const cd y0 = curve.y_coeff(0)(x);
    if (std::abs(y2) <= 1e-14 * curve.scale() * std::max(1.0, std::norm(x))) {
        throw Error(ErrorKind::PoleOfQuadratic, "y_branches: y^2 coefficient vanishes, one root is at infinity");
    }
    const cd r = std::sqrt(y1 * y1 - 4.0 * y2 * y0);
    return {(-y1 + r) / (2.0 * y2), (-y1 - r) / (2.0 * y2)};
}

DoubleCover::DoubleCover(const Biquadratic& curve, const BranchData& branch)
    : curve_(curve),
      branch_(branch),
      delta_(partial_discriminant(curve)),
      delta_rev_(delta_.reversed()),
      y2_(curve.y_coeff(2)),
      y1_(curve.y_coeff(1)),
      y0_(curve.y_coeff(0)) {}

namespace {

cd sheet_from_coeffs(cd Y2, cd Y1, cd Y0, const ProjCoord& y) {
    if (y.is_infinite()) return -Y1;
    const ProjCoord n = y.normalized();
    if (std::abs(n.den()) >= std::abs(n.num())) return (2.0 * Y2 * n.num() + Y1 * n.den()) / n.den();
    return -(Y1 * n.num() + 2.0 * Y0 * n.den()) / n.num();
}

ProjCoord y_from_coeffs(cd Y2, cd Y1, cd Y0, cd s) {
    const cd n1 = s - Y1, d1 = 2.0 * Y2;
    const cd n2 = -2.0 * Y0, d2 = s + Y1;
    if (std::hypot(std::abs(n1), std::abs(d1)) >= std::hypot(std::abs(n2), std::abs(d2))) {
        return ProjCoord::homogeneous(n1, d1).normalized();
    }
    return ProjCoord::homogeneous(n2, d2).normalized();
}

}  // namespace

cd DoubleCover::sheet_value(const SheetedPoint& p) const {
    if (p.x.is_infinite()) {
        return sheet_from_coeffs(curve_.c[0][0], curve_.c[0][1], curve_.c[0][2], p.y);
    }
    const cd x = p.x.value();
    return sheet_from_coeffs(y2_(x), y1_(x), y0_(x), p.y);
}

SheetedPoint DoubleCover::point_at(cd x, cd s) const {
    return {ProjCoord(x), y_from_coeffs(y2_(x), y1_(x), y0_(x), s)};
}

SheetedPoint DoubleCover::point_at_infinity(cd s_tilde) const {
    return {ProjCoord::infinity(), y_from_coeffs(curve_.c[0][0], curve_.c[0][1], curve_.c[0][2], s_tilde)};
}

TrackResult track_integral(const DoubleCover& cover, const IntegrationPath& path) {
    if (path.waypoints.empty() || path.start.x.is_infinite()) {
        throw Error(ErrorKind::InvalidInput, "track_integral: path must start at a finite x");
    }
    cd s = cover.sheet_value(path.start);
    cd total = 0.0;
    for (std::size_t k = 0; k + 1 < path.waypoints.size(); ++k) {
        const PieceResult r = integrate_segment(cover.delta(), path.waypoints[k], path.waypoints[k + 1], s, 1.0);
        total += r.value;
        s = r.s_end;
    }
    const cd last = path.waypoints.back();
    if (!path.ends_at_infinity) {
        return {total, cover.point_at(last, s), s};
    }
    if (last == cd(0.0)) {
        throw Error(ErrorKind::ChartDegenerate, "track_integral: chart switch at x = 0");
    }
    if (std::abs(cover.delta_reversed().c[0]) == 0.0) {
        throw Error(ErrorKind::ChartDegenerate, "track_integral: x = inf is a branch point");
    }
    // dx / s = -dX / (X^2 s) with X = 1/x.
    const cd X0 = 1.0 / last;
    const PieceResult r = integrate_segment(cover.delta_reversed(), X0, 0.0, s * X0 * X0, -1.0);
    total += r.value;
    return {total, cover.point_at_infinity(r.s_end), r.s_end};
}

std::vector<cd> route(const BranchData& branch, cd from, cd to) {
    struct Detour {
        double t;
        cd q;
        double radius;
    };
    std::vector<Detour> detours;
    const cd d = to - from;
    const double len2 = std::norm(d);
    const double arc_scale = 1.0 / std::cos(M_PI / kArcSteps) * (1.0 + 1e-9);
    if (len2 > 0.0) {
        for (const cd& q : branch.q) {
            const double m = std::min(branch.margin, 0.5 * std::min(std::abs(from - q), std::abs(to - q)));
            if (m < 1e-12 * branch.diameter) {
                throw Error(ErrorKind::PathTooCloseToBranchPoint, "route: endpoint coincides with a branch point");
            }
            const double radius = m * arc_scale;
            const double t = std::real((q - from) * std::conj(d)) / len2;
            if (t <= 0.0 || t >= 1.0) continue;
            const double dist = std::abs(q - (from + t * d));
            if (dist < radius) detours.push_back({t, q, radius});
        }
    }
    std::sort(detours.begin(), detours.end(), [](const Detour& a, const Detour& b) { return a.t < b.t; });
    std::vector<cd> pts{from};
    const double len = std::sqrt(len2);
    for (const Detour& det : detours) {
        const double dist = std::abs(det.q - (from + det.t * d));
        const double half = std::sqrt(det.radius * det.radius - dist * dist) / len;
        const cd entry = from + (det.t - half) * d;
        const cd exit = from + (det.t + half) * d;
        const double th0 = std::arg(entry - det.q);
        double dth = std::arg((exit - det.q) / (entry - det.q));  // minor arc, (-pi, pi]
        const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(dth) / (2.0 * M_PI / kArcSteps))));
        pts.push_back(entry);
        for (int k = 1; k < steps; ++k) {
            pts.push_back(det.q + std::polar(det.radius, th0 + dth * k / steps));
        }
        pts.push_back(exit);
    }
    pts.push_back(to);
    return pts;
}

std::vector<cd> loop_around_pair(const BranchData& branch, int i, int j) {
    const cd qa = branch.q[i];
    const cd qb = branch.q[j];
    const double sep = std::abs(qb - qa);
    const double radius = std::min(0.5 * pair_clearance(branch.q, i, j), 0.5 * sep + branch.margin);
    const double dir = std::arg(qb - qa);
    constexpr int kHalf = kArcSteps / 2;
    std::vector<cd> pts;
    for (int k = 0; k <= kHalf; ++k) {
        pts.push_back(qb + std::polar(radius, dir - M_PI / 2 + M_PI * k / kHalf));
    }
    for (int k = 0; k <= kHalf; ++k) {
        pts.push_back(qa + std::polar(radius, dir + M_PI / 2 + M_PI * k / kHalf));
    }
    pts.push_back(pts.front());
    return pts;
}

PeriodLoops compute_period_loops(const DoubleCover& cover) {
    const BranchData& b = cover.branch();
    auto run_loop = [&](int i, int j, IntegrationPath& path) {
        path.waypoints = loop_around_pair(b, i, j);
        const cd x0 = path.waypoints.front();
        path.start = cover.point_at(x0, std::sqrt(cover.delta()(x0)));
        const TrackResult r = track_integral(cover, path);
        const cd s0 = cover.sheet_value(path.start);
        if (!same_sheet(r.end_sheet, s0, 0.0)) {
            throw Error(ErrorKind::SheetMismatch, "compute_periods: period loop did not close on its sheet");
        }
        return r.value;
    };
    PeriodLoops out;
    out.w_delta1 = run_loop(b.chain[0], b.chain[1], out.delta1);
    out.w_delta2 = run_loop(b.chain[1], b.chain[2], out.delta2);
    out.lattice = make_lattice(out.w_delta1, out.w_delta2);
    return out;
}

Lattice compute_periods(const DoubleCover& cover) { return compute_period_loops(cover).lattice; }

AbelResult abel_integral(const DoubleCover& cover, const SheetedPoint& base, const SheetedPoint& target) {
    if (base.x.is_infinite()) {
        throw Error(ErrorKind::InvalidInput, "abel_integral: base point must have finite x");
    }
    const BranchData& b = cover.branch();
    const cd bx = base.x.value();
    const bool to_inf = target.x.is_infinite();
    const cd s_target = cover.sheet_value(target);
    double max_q = 0.0;
    for (const cd& q : b.q) max_q = std::max(max_q, std::abs(q));
    cd end_x;
    if (to_inf) {
        const cd dir = std::abs(bx) > 1e-12 ? bx / std::abs(bx) : cd(1.0);
        end_x = dir * std::max(4.0 * max_q, 1.5 * std::abs(bx));
    } else {
        end_x = target.x.value();
    }
    const double abs_floor = 1e-8 * std::sqrt(cover.delta().scale()) * (to_inf ? 1.0 : std::max(1.0, std::norm(end_x)));

    auto append = [](std::vector<cd>& dst, const std::vector<cd>& src) {
        dst.insert(dst.end(), src.begin() + 1, src.end());
    };
    for (bool detour : {false, true}) {
        IntegrationPath path;
        path.start = base;
        path.ends_at_infinity = to_inf;
        path.waypoints = {bx};
        if (detour) {
            const cd q1 = b.q[0];
            const double r = std::min(b.margin, 0.5 * std::abs(bx - q1)) / std::cos(M_PI / kArcSteps);
            const cd entry = q1 + r * (bx - q1) / std::abs(bx - q1);
            append(path.waypoints, route(b, bx, entry));
            const double th0 = std::arg(entry - q1);
            for (int k = 1; k <= kArcSteps; ++k) {
                path.waypoints.push_back(k == kArcSteps ? entry : q1 + std::polar(r, th0 + 2.0 * M_PI * k / kArcSteps));
            }
            append(path.waypoints, route(b, entry, bx));
        }
        append(path.waypoints, route(b, bx, end_x));
        const TrackResult tr = track_integral(cover, path);
        if (same_sheet(tr.end_sheet, s_target, abs_floor)) {
            return {tr.value, std::move(path), detour};
        }
    }
    throw Error(ErrorKind::SheetMismatch, "abel_integral: could not reach the target's sheet");
}

cd abel_to_point(const DoubleCover& cover, const SheetedPoint& base, const SheetedPoint& target) {
    return abel_integral(cover, base, target).value;
}

cd abel_to_infinity(const DoubleCover& cover, const SheetedPoint& base, const SheetedPoint& target) {
    if (!target.x.is_infinite()) {
        throw Error(ErrorKind::InvalidInput, "abel_to_infinity: target must have x = inf");
    }
    return abel_integral(cover, base, target).value;
}

std::vector<AbelResult> abel_batch_serial(const DoubleCover& cover, const SheetedPoint& base,
                                          const std::vector<SheetedPoint>& targets) {
    std::vector<AbelResult> out;
    out.reserve(targets.size());
    for (const SheetedPoint& t : targets) out.push_back(abel_integral(cover, base, t));
    return out;
}

std::vector<AbelResult> abel_batch(const DoubleCover& cover, const SheetedPoint& base,
                                   const std::vector<SheetedPoint>& targets, bool parallel) {
    if (!parallel) return abel_batch_serial(cover, base, targets);
    const long n = static_cast<long>(targets.size());
    std::vector<AbelResult> out(targets.size());
    std::vector<std::exception_ptr> errors(targets.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) {
        try {
            out[i] = abel_integral(cover, base, targets[i]);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace qrt
