#pragma once

#include <cmath>
#include <numbers>

#include "qwalk/rational.hpp"

namespace qwalk {

inline constexpr double kPi = std::numbers::pi;

// Shifted modulo-2 map onto [-1, 1): -1 + mod(x + 1, 2). Odd integers map to -1.
inline double wrap_unit(double x) {
    double y = std::fmod(x + 1.0, 2.0);
    if (y < 0.0) y += 2.0;
    if (y >= 2.0) y -= 2.0;
    return y - 1.0;
}

inline Rational wrap_unit(const Rational& x) {
    Rational y = x + Rational(1);
    Rational halves = y / Rational(2);
    return y - Rational(2 * halves.floor()) - Rational(1);
}

template <class Real>
Real clamp_unit(const Real& x) {
    if (x > Real(1)) return Real(1);
    if (x < Real(-1)) return Real(-1);
    return x;
}

template <class Real>
int sign_of(const Real& x) {
    if (x > Real(0)) return 1;
    if (x < Real(0)) return -1;
    return 0;
}

}  // namespace qwalk
