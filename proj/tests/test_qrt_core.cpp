#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "qrt/errors.hpp"
#include "qrt/qrt_map.hpp"

using namespace qrt;
using oracle::cd;

namespace {

const cd I(0.0, 1.0);

double rel(cd a, cd b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

ProjPoint finite(cd x, cd y) { return {ProjCoord(x), ProjCoord(y)}; }

QrtMap random_map(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    QrtMap m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            m.A[i][j] = cd(g(rng), g(rng));
            m.B[i][j] = cd(g(rng), g(rng));
        }
    return m;
}

}  // namespace

TEST_CASE("eval_pencil on the example pencil") {
    const QrtMap m = oracle::phi1_map();
    CHECK(std::abs(eval_pencil(m, 1.0, cd(0.437561, 0.328195), 0.0)) < 1e-5);
    CHECK(std::abs(eval_pencil(m, cd(-0.5, 0.5), 0.0, 0.0)) < 1e-12);
    const cd K(0.3, -1.7);
    CHECK(eval_pencil(m, 0.0, 0.0, K) == m.A[2][2] + K * m.B[2][2]);
}

TEST_CASE("eval_pencil homogeneous form agrees with the finite one") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    const QrtMap m = random_map(rng);
    for (int k = 0; k < 20; ++k) {
        const cd x(g(rng), g(rng)), y(g(rng), g(rng)), K(g(rng), g(rng));
        const double lam = 3.7;
        const ProjPoint p{ProjCoord::homogeneous(lam * x, lam), ProjCoord::homogeneous(y / lam, 1.0 / lam)};
        const ProjPoint pn{p.x.normalized(), p.y.normalized()};
        const cd scale = std::pow(pn.x.den(), 2) * std::pow(pn.y.den(), 2);
        CHECK(rel(eval_pencil(m, p, K), scale * eval_pencil(m, x, y, K)) < 1e-12);
    }
}

TEST_CASE("compute_K") {
    const ProjPoint p0 = oracle::phi_p0();
    CHECK(std::abs(compute_K(oracle::phi1_map(), p0)) < 1e-14);
    CHECK(std::abs(compute_K(oracle::phi2_map(), p0)) < 1e-14);
    // The printed (rounded) initial value gives K within rounding of 0.
    CHECK(std::abs(compute_K(oracle::phi1_map(), finite(1.0, cd(0.437561, 0.328195)))) < 1e-5);

    QrtMap same;
    same.A = oracle::phi1_map().A;
    same.B = same.A;
    CHECK(std::abs(compute_K(same, finite(0.3, 0.9)) + 1.0) < 1e-14);

    std::mt19937_64 rng(3);
    const QrtMap r = random_map(rng);
    const ProjPoint p = finite(cd(0.2, 0.1), cd(-0.4, 0.8));
    CHECK(std::abs(eval_pencil(r, p, compute_K(r, p))) < 1e-12);
}

TEST_CASE("compute_K errors") {
    const QrtMap m = oracle::phi1_map();
    // x + y = 0 kills the B term only: the orbit lives on x^T B y = 0.
    try {
        compute_K(m, finite(0.7, -0.7));
        FAIL("expected InfiniteK");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InfiniteK);
    }
    try {
        compute_K(m, finite(0.0, 0.0));
        FAIL("expected DegeneratePoint");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegeneratePoint);
    }
}

TEST_CASE("fix_curve") {
    const QrtMap m = oracle::phi1_map();
    const Biquadratic c = fix_curve(m, 0.0);
    CHECK(c.c == m.A);
    CHECK(fix_curve(oracle::phi2_map(), 0.0).c == c.c);
    // P(x,y;0) = -(7+i)x^2y + 4i xy^2 + (3+i)x^2 - (5-2i)xy + (3+4i)y^2 + (2-i)x + 6y
    CHECK(c.a(2, 1) == -(7.0 + I));
    CHECK(c.a(1, 2) == 4.0 * I);
    CHECK(c.a(2, 0) == 3.0 + I);
    CHECK(c.a(1, 1) == -(5.0 - 2.0 * I));
    CHECK(c.a(0, 2) == 3.0 + 4.0 * I);
    CHECK(c.a(1, 0) == 2.0 - I);
    CHECK(c.a(0, 1) == 6.0);
    CHECK(c.a(2, 2) == 0.0);
    CHECK(c.a(0, 0) == 0.0);
}

TEST_CASE("qrt_step matches the printed recurrences") {
    ProjPoint p = oracle::phi_p0();
    cd x = p.x.value(), y = p.y.value();
    for (int n = 0; n < 10; ++n) {
        const auto ref = oracle::phi1_step(x, y);
        p = qrt_step(oracle::phi1_map(), p);
        CHECK(rel(p.x.value(), ref[0]) < 1e-10);
        CHECK(rel(p.y.value(), ref[1]) < 1e-10);
        x = ref[0];
        y = ref[1];
    }
    p = oracle::phi_p0();
    const auto ref2 = oracle::phi2_step(p.x.value(), p.y.value());
    const ProjPoint q2 = qrt_step(oracle::phi2_map(), p);
    CHECK(rel(q2.x.value(), ref2[0]) < 1e-12);
    CHECK(rel(q2.y.value(), ref2[1]) < 1e-12);
}

TEST_CASE("phi1 and phi2 share orbits on the common curve") {
    ProjPoint a = oracle::phi_p0(), b = a;
    for (int n = 1; n <= 5; ++n) {
        a = qrt_step(oracle::phi1_map(), a);
        b = qrt_step(oracle::phi2_map(), b);
        CHECK(chordal(a, b) < 1e-10);
    }
}

TEST_CASE("switches are involutions and the inverse step inverts") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    const QrtMap m = random_map(rng);
    for (int k = 0; k < 20; ++k) {
        const ProjPoint p = finite(cd(g(rng), g(rng)), cd(g(rng), g(rng)));
        const ProjPoint hh = horizontal_switch(m, horizontal_switch(m, p));
        const ProjPoint vv = vertical_switch(m, vertical_switch(m, p));
        CHECK(rel(hh.x.value(), p.x.value()) < 1e-10);
        CHECK(rel(vv.y.value(), p.y.value()) < 1e-10);
        CHECK(chordal(qrt_step_inverse(m, qrt_step(m, p)), p) < 1e-10);
    }
}

TEST_CASE("qrt_step is chart independent") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    const QrtMap m = random_map(rng);
    for (int k = 0; k < 20; ++k) {
        const cd x(g(rng), g(rng)), y(g(rng), g(rng));
        const ProjPoint a = qrt_step(m, finite(x, y));
        const ProjPoint b = qrt_step(m, {ProjCoord::homogeneous(x * 1e3, 1e3), ProjCoord::homogeneous(y * 1e-3, 1e-3)});
        CHECK(rel(a.x.value(), b.x.value()) < 1e-12);
        CHECK(rel(a.y.value(), b.y.value()) < 1e-12);
    }
}

TEST_CASE("qrt_step through infinity") {
    const QrtMap m = oracle::phi1_map();
    // (inf, 0.44+0.08i) is a base point; any other y on the line x = inf is regular.
    const ProjPoint p{ProjCoord::infinity(), ProjCoord(cd(1.0, 1.0))};
    const ProjPoint q = qrt_step(m, p);
    const ProjPoint back = qrt_step_inverse(m, q);
    CHECK(chordal(back, p) < 1e-10);
}

TEST_CASE("indeterminate points are rejected") {
    const QrtMap m = oracle::phi1_map();
    // (0, 0) is a base point: both pencil members vanish.
    try {
        horizontal_switch(m, finite(0.0, 0.0));
        FAIL("expected IndeterminatePoint");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::IndeterminatePoint);
    }
}

TEST_CASE("K is conserved along 100 iterates") {
    const QrtMap m = oracle::phi1_map();
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 3; ++trial) {
        ProjPoint p = finite(cd(g(rng), g(rng)), cd(g(rng), g(rng)));
        const cd K0 = compute_K(m, p);
        for (int n = 0; n < 100; ++n) {
            p = qrt_step(m, p);
            if (p.x.near_infinite(1e-8) || p.y.near_infinite(1e-8)) continue;
            CHECK(std::abs(compute_K(m, p) - K0) / (1.0 + std::abs(K0)) < 1e-9);
        }
    }
}

TEST_CASE("base points of the example pencils") {
    for (const QrtMap& m : {oracle::phi1_map(), oracle::phi2_map()}) {
        const auto bps = find_base_points(m);
        int total = 0;
        for (const BasePoint& b : bps) {
            total += b.multiplicity;
            CHECK(base_point_residual(m, b.point) < 1e-8);
            CHECK(std::abs(eval_pencil(m, b.point, 0.0)) < 1e-8 * max_abs(m.A));
            CHECK(std::abs(eval_pencil(m, b.point, 1.0)) < 1e-8 * max_abs(m.A));
        }
        CHECK(total == 8);
    }
    // phi1: (inf, inf) is a triple base point.
    const auto bps = find_base_points(oracle::phi1_map());
    bool found = false;
    for (const BasePoint& b : bps) {
        if (b.point.x.near_infinite(1e-8) && b.point.y.near_infinite(1e-8)) {
            found = true;
            CHECK(b.multiplicity == 3);
        }
    }
    CHECK(found);
}

TEST_CASE("base point x-coordinates are roots of the Sylvester resultant") {
    std::mt19937_64 rng(17);
    const QrtMap m = random_map(rng);
    const auto bps = find_base_points(m);
    int total = 0;
    for (const BasePoint& b : bps) {
        total += b.multiplicity;
        REQUIRE(b.point.x.is_finite());
        const cd x = b.point.x.value();
        // A(x, y) and B(x, y) as quadratics in y (ascending).
        std::vector<cd> a(3), bb(3);
        for (int k = 0; k < 3; ++k) {
            for (int i = 0; i < 3; ++i) {
                a[k] += m.A[i][2 - k] * std::pow(x, 2 - i);
                bb[k] += m.B[i][2 - k] * std::pow(x, 2 - i);
            }
        }
        const double s = std::pow(std::max(1.0, std::abs(x)), 8) * std::pow(max_abs(m.A) * max_abs(m.B), 2);
        CHECK(std::abs(oracle::sylvester_resultant(a, bb)) < 1e-8 * s);
    }
    CHECK(total == 8);
}

TEST_CASE("QrtMap validation") {
    QrtMap z;
    CHECK_THROWS_AS(z.validate(), Error);
    QrtMap prop = oracle::phi1_map();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) prop.B[i][j] = (2.0 - I) * prop.A[i][j];
    CHECK_THROWS_AS(prop.validate(), Error);
    CHECK_NOTHROW(oracle::phi1_map().validate());
}
