#include "qrt/proj.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace qrt {

cd ProjCoord::value() const {
    if (is_infinite()) {
        return {std::numeric_limits<double>::infinity(), 0.0};
    }
    return num_ / den_;
}

ProjCoord ProjCoord::normalized() const {
    const double scale = std::max(std::abs(num_), std::abs(den_));
    if (scale == 0.0) {
        return *this;
    }
    return ProjCoord(num_ / scale, den_ / scale);
}

std::array<cd, 3> ProjCoord::monomials() const {
    const ProjCoord n = normalized();
    return {n.num_ * n.num_, n.num_ * n.den_, n.den_ * n.den_};
}

double chordal(const ProjCoord& a, const ProjCoord& b) {
    const ProjCoord an = a.normalized();
    const ProjCoord bn = b.normalized();
    const double na = std::hypot(std::abs(an.num()), std::abs(an.den()));
    const double nb = std::hypot(std::abs(bn.num()), std::abs(bn.den()));
    if (na == 0.0 || nb == 0.0) {
        return 1.0;
    }
    return std::abs(an.num() * bn.den() - an.den() * bn.num()) / (na * nb);
}

double chordal(const ProjPoint& a, const ProjPoint& b) {
    return std::max(chordal(a.x, b.x), chordal(a.y, b.y));
}

std::string format_complex(cd z, int digits) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.*g%+.*gi", digits, z.real(), digits, z.imag());
    return buf;
}

std::string format_coord(const ProjCoord& c, int digits) {
    if (c.is_infinite()) {
        return "inf";
    }
    return format_complex(c.value(), digits);
}

double max_abs(const Mat3& m) {
    double s = 0.0;
    for (const auto& row : m) {
        for (const auto& v : row) {
            s = std::max(s, std::abs(v));
        }
    }
    return s;
}

}  // namespace qrt
