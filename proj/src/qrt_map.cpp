#include "qrt/qrt_map.hpp"

#include <algorithm>
#include <cmath>

#include "qrt/errors.hpp"

namespace qrt {

namespace {

using Vec3 = std::array<cd, 3>;

Vec3 mat_vec(const Mat3& m, const Vec3& v) {
    Vec3 r{};
    for (int i = 0; i < 3; ++i) {
        r[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
    }
    return r;
}

Vec3 mat_t_vec(const Mat3& m, const Vec3& v) {
    Vec3 r{};
    for (int j = 0; j < 3; ++j) {
        r[j] = m[0][j] * v[0] + m[1][j] * v[1] + m[2][j] * v[2];
    }
    return r;
}

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

cd dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double norm_inf(const Vec3& v) {
    return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
}

cd bilinear(const Mat3& m, const Vec3& xv, const Vec3& yv) { return dot(xv, mat_vec(m, yv)); }

constexpr double kIndeterminateTol = 1e-12;

// Applies the involution z -> (f0 - f1 z)/(f1 - f2 z) in homogeneous form.
ProjCoord switch_coord(const Vec3& f, const ProjCoord& z, double scale) {
    const ProjCoord zn = z.normalized();
    const cd s = zn.num();
    const cd t = zn.den();
    const cd num = f[0] * t - f[1] * s;
    const cd den = f[1] * t - f[2] * s;
    if (std::abs(num) <= kIndeterminateTol * scale && std::abs(den) <= kIndeterminateTol * scale) {
        throw Error(ErrorKind::IndeterminatePoint, "switch is indeterminate (base point of the pencil)");
    }
    return ProjCoord::homogeneous(num, den).normalized();
}

Poly row_poly(const Mat3& m, int i) { return Poly({m[i][2], m[i][1], m[i][0]}); }
Poly col_poly(const Mat3& m, int j) { return Poly({m[2][j], m[1][j], m[0][j]}); }

}  // namespace

cd Biquadratic::operator()(cd x, cd y) const {
    const Vec3 xv{x * x, x, 1.0};
    const Vec3 yv{y * y, y, 1.0};
    return bilinear(c, xv, yv);
}

cd Biquadratic::eval(const ProjPoint& p) const {
    return bilinear(c, p.x.monomials(), p.y.monomials());
}

Poly Biquadratic::y_coeff(int k) const { return col_poly(c, 2 - k); }
Poly Biquadratic::x_coeff(int k) const { return row_poly(c, 2 - k); }

Biquadratic Biquadratic::transposed() const {
    Biquadratic t;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) t.c[i][j] = c[j][i];
    return t;
}

void QrtMap::validate() const {
    const double sa = max_abs(A);
    const double sb = max_abs(B);
    if (sa == 0.0 && sb == 0.0) {
        throw Error(ErrorKind::InvalidInput, "QrtMap: A and B are both zero");
    }
    if (sa == 0.0 || sb == 0.0) {
        return;
    }
    // Proportional iff every 2x2 minor of the 9x2 matrix [vec(A) vec(B)] vanishes.
    double worst = 0.0;
    for (int i = 0; i < 9; ++i) {
        for (int j = i + 1; j < 9; ++j) {
            const cd m = A[i / 3][i % 3] * B[j / 3][j % 3] - A[j / 3][j % 3] * B[i / 3][i % 3];
            worst = std::max(worst, std::abs(m));
        }
    }
    if (worst <= 1e-13 * sa * sb) {
        throw Error(ErrorKind::InvalidInput, "QrtMap: A and B are proportional, the pencil is a single curve");
    }
}

cd eval_pencil(const QrtMap& map, cd x, cd y, cd K) {
    const Vec3 xv{x * x, x, 1.0};
    const Vec3 yv{y * y, y, 1.0};
    return bilinear(map.A, xv, yv) + K * bilinear(map.B, xv, yv);
}

cd eval_pencil(const QrtMap& map, const ProjPoint& p, cd K) {
    const Vec3 xv = p.x.monomials();
    const Vec3 yv = p.y.monomials();
    return bilinear(map.A, xv, yv) + K * bilinear(map.B, xv, yv);
}

cd compute_K(const QrtMap& map, const ProjPoint& p0) {
    const Vec3 xv = p0.x.monomials();
    const Vec3 yv = p0.y.monomials();
    const cd pa = bilinear(map.A, xv, yv);
    const cd pb = bilinear(map.B, xv, yv);
    const double tol_a = kIndeterminateTol * std::max(max_abs(map.A), 1e-300);
    const double tol_b = kIndeterminateTol * std::max(max_abs(map.B), 1e-300);
    if (std::abs(pb) <= tol_b) {
        if (std::abs(pa) <= tol_a) {
            throw Error(ErrorKind::DegeneratePoint, "compute_K: initial point is a base point of the pencil");
        }
        throw Error(ErrorKind::InfiniteK, "compute_K: x^T B y = 0, the invariant curve is x^T B y = 0");
    }
    return -pa / pb;
}

Biquadratic fix_curve(const QrtMap& map, cd K0) {
    Biquadratic curve;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) curve.c[i][j] = map.A[i][j] + K0 * map.B[i][j];
    return curve;
}

ProjPoint horizontal_switch(const QrtMap& map, const ProjPoint& p) {
    const Vec3 yv = p.y.monomials();
    const Vec3 f = cross(mat_vec(map.A, yv), mat_vec(map.B, yv));
    return {switch_coord(f, p.x, max_abs(map.A) * max_abs(map.B)), p.y};
}

ProjPoint vertical_switch(const QrtMap& map, const ProjPoint& p) {
    const Vec3 xv = p.x.monomials();
    const Vec3 g = cross(mat_t_vec(map.A, xv), mat_t_vec(map.B, xv));
    return {p.x, switch_coord(g, p.y, max_abs(map.A) * max_abs(map.B))};
}

ProjPoint qrt_step(const QrtMap& map, const ProjPoint& p) {
    return vertical_switch(map, horizontal_switch(map, p));
}

ProjPoint qrt_step_inverse(const QrtMap& map, const ProjPoint& p) {
    return horizontal_switch(map, vertical_switch(map, p));
}

double base_point_residual(const QrtMap& map, const ProjPoint& p) {
    const Vec3 xv = p.x.monomials();
    const Vec3 yv = p.y.monomials();
    const double ra = std::abs(bilinear(map.A, xv, yv)) / std::max(max_abs(map.A), 1e-300);
    const double rb = std::abs(bilinear(map.B, xv, yv)) / std::max(max_abs(map.B), 1e-300);
    return std::max(ra, rb);
}

namespace {

// Local affine chart of one CP^1 factor: either z itself or 1/z.
struct Chart {
    bool inverted = false;
    cd z;

    static Chart from(const ProjCoord& c) {
        const ProjCoord n = c.normalized();
        if (std::abs(n.den()) >= std::abs(n.num())) return {false, n.num() / n.den()};
        return {true, n.den() / n.num()};
    }
    Vec3 monomials() const {
        return inverted ? Vec3{1.0, z, z * z} : Vec3{z * z, z, 1.0};
    }
    Vec3 d_monomials() const {
        return inverted ? Vec3{0.0, 1.0, 2.0 * z} : Vec3{2.0 * z, 1.0, 0.0};
    }
    ProjCoord coord() const {
        return inverted ? ProjCoord::homogeneous(1.0, z) : ProjCoord(z);
    }
};

ProjPoint newton_polish(const QrtMap& map, const ProjPoint& p) {
    const double sa = std::max(max_abs(map.A), 1e-300);
    const double sb = std::max(max_abs(map.B), 1e-300);
    Chart cx = Chart::from(p.x);
    Chart cy = Chart::from(p.y);
    auto residual = [&](const Chart& a, const Chart& b) {
        const Vec3 xv = a.monomials();
        const Vec3 yv = b.monomials();
        return std::max(std::abs(bilinear(map.A, xv, yv)) / sa, std::abs(bilinear(map.B, xv, yv)) / sb);
    };
    double res = residual(cx, cy);
    for (int it = 0; it < 30 && res > 1e-15; ++it) {
        const Vec3 xv = cx.monomials(), yv = cy.monomials();
        const Vec3 dxv = cx.d_monomials(), dyv = cy.d_monomials();
        const cd fa = bilinear(map.A, xv, yv) / sa, fb = bilinear(map.B, xv, yv) / sb;
        const cd j11 = bilinear(map.A, dxv, yv) / sa, j12 = bilinear(map.A, xv, dyv) / sa;
        const cd j21 = bilinear(map.B, dxv, yv) / sb, j22 = bilinear(map.B, xv, dyv) / sb;
        const cd det = j11 * j22 - j12 * j21;
        if (std::abs(det) < 1e-300) break;
        Chart nx = cx, ny = cy;
        nx.z -= (j22 * fa - j12 * fb) / det;
        ny.z -= (j11 * fb - j21 * fa) / det;
        const double r2 = residual(nx, ny);
        if (!(r2 < res)) break;
        cx = nx;
        cy = ny;
        res = r2;
    }
    return {cx.coord().normalized(), cy.coord().normalized()};
}

// Candidate base points on the lines "second coordinate = root" for every
// root of the resultant of the pencil members viewed as quadratics in the
// first coordinate. `transpose` swaps the roles of x and y.
void collect_candidates(const Mat3& A, const Mat3& B, bool transpose, std::vector<ProjCoord>& roots,
                        std::vector<ProjPoint>& out) {
    std::array<Poly, 3> u, v;
    for (int i = 0; i < 3; ++i) {
        u[i] = transpose ? col_poly(A, i) : row_poly(A, i);
        v[i] = transpose ? col_poly(B, i) : row_poly(B, i);
    }
    const Poly f0 = u[1] * v[2] - u[2] * v[1];
    const Poly f1 = u[2] * v[0] - u[0] * v[2];
    const Poly f2 = u[0] * v[1] - u[1] * v[0];
    Poly res = f1 * f1 - f0 * f2;
    res.c.resize(9, cd(0.0));
    const double scale = std::max(max_abs(A), 1e-300) * std::max(max_abs(B), 1e-300);
    if (res.max_coeff() <= 1e-13 * scale * scale) {
        throw Error(ErrorKind::DegeneratePencil, "find_base_points: resultant vanishes identically");
    }
    const RootSet rs = poly_roots(res.c);
    for (const cd& r : rs.finite) roots.emplace_back(r);
    for (int k = 0; k < rs.at_infinity; ++k) roots.push_back(ProjCoord::infinity());

    for (const ProjCoord& r : roots) {
        const Vec3 rv = r.monomials();
        const Vec3 a = transpose ? mat_t_vec(A, rv) : mat_vec(A, rv);
        const Vec3 b = transpose ? mat_t_vec(B, rv) : mat_vec(B, rv);
        const Vec3 f = cross(a, b);
        std::vector<ProjCoord> others;
        if (norm_inf(f) > 1e-8 * scale) {
            // (z^2, z, 1) is parallel to f.
            if (std::abs(f[0]) + std::abs(f[1]) >= std::abs(f[1]) + std::abs(f[2]))
                others.push_back(ProjCoord::homogeneous(f[0], f[1]));
            else
                others.push_back(ProjCoord::homogeneous(f[1], f[2]));
        } else {
            // Both members restrict to proportional quadratics on this line.
            const Vec3& w = norm_inf(a) >= norm_inf(b) ? a : b;
            const auto qr = quadratic_roots(w[0], w[1], w[2]);
            others.assign(qr.begin(), qr.end());
        }
        for (const ProjCoord& o : others) {
            out.push_back(transpose ? ProjPoint{r, o} : ProjPoint{o, r});
        }
    }
}

}  // namespace

std::vector<BasePoint> find_base_points(const QrtMap& map) {
    constexpr double kCluster = 1e-6;
    std::vector<ProjCoord> y_roots, x_roots;
    std::vector<ProjPoint> candidates;
    // Rows of A pair with y-monomials: A y is a vector of quadratics in y.
    collect_candidates(map.A, map.B, false, y_roots, candidates);
    collect_candidates(map.A, map.B, true, x_roots, candidates);

    std::vector<ProjPoint> points;
    std::vector<double> residuals;
    for (const ProjPoint& c : candidates) {
        const ProjPoint p = newton_polish(map, c);
        const double r = base_point_residual(map, p);
        if (r > 1e-6) continue;  // spurious pairing from an ill-conditioned root
        bool merged = false;
        for (std::size_t k = 0; k < points.size(); ++k) {
            if (chordal(points[k], p) < kCluster) {
                if (r < residuals[k]) {
                    points[k] = p;
                    residuals[k] = r;
                }
                merged = true;
                break;
            }
        }
        if (!merged) {
            points.push_back(p);
            residuals.push_back(r);
        }
    }

    // Multiplicity bookkeeping: the resultant's root multiplicity at a value
    // equals the summed intersection multiplicity over points on that line.
    const std::size_t n = points.size();
    struct Group {
        std::vector<std::size_t> members;
        int total = 0;
    };
    auto build_groups = [&](bool use_y, const std::vector<ProjCoord>& roots) {
        std::vector<Group> groups;
        std::vector<bool> used(n, false);
        for (std::size_t i = 0; i < n; ++i) {
            if (used[i]) continue;
            Group g;
            const ProjCoord& ci = use_y ? points[i].y : points[i].x;
            for (std::size_t j = i; j < n; ++j) {
                const ProjCoord& cj = use_y ? points[j].y : points[j].x;
                if (!used[j] && chordal(ci, cj) < kCluster) {
                    used[j] = true;
                    g.members.push_back(j);
                }
            }
            for (const ProjCoord& r : roots) {
                if (chordal(r, ci) < kCluster) ++g.total;
            }
            groups.push_back(std::move(g));
        }
        return groups;
    };
    std::vector<Group> groups = build_groups(true, y_roots);
    const std::vector<Group> gx = build_groups(false, x_roots);
    groups.insert(groups.end(), gx.begin(), gx.end());

    std::vector<int> mult(n, 0);
    std::size_t assigned = 0;
    while (assigned < n) {
        bool progress = false;
        for (const Group& g : groups) {
            int known = 0;
            std::size_t unknown_idx = n;
            int unknown_count = 0;
            for (std::size_t m : g.members) {
                if (mult[m] > 0) known += mult[m];
                else {
                    ++unknown_count;
                    unknown_idx = m;
                }
            }
            if (unknown_count == 1) {
                mult[unknown_idx] = std::max(1, g.total - known);
                ++assigned;
                progress = true;
            }
        }
        if (!progress) {
            for (std::size_t i = 0; i < n; ++i) {
                if (mult[i] == 0) {
                    mult[i] = 1;
                    ++assigned;
                    break;
                }
            }
        }
    }

    std::vector<BasePoint> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back({points[i], mult[i]});
    return out;
}

}  // namespace qrt
