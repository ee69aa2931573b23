#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace qwalk {

// Exact fraction with 64-bit numerator and denominator. Arithmetic is done in
// 128-bit intermediates and reduced; results that do not fit throw
// std::overflow_error instead of wrapping.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);

    // Parses "3", "-7/4" or a terminating decimal such as "0.3125".
    static Rational parse(const std::string& text);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    // Largest integer not above the value.
    std::int64_t floor() const;

    Rational operator-() const;
    Rational& operator+=(const Rational& o);
    Rational& operator-=(const Rational& o);
    Rational& operator*=(const Rational& o);
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

    std::string str() const;

private:
    static Rational reduce(__int128 num, __int128 den);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.to_double(); }

inline Rational abs(const Rational& x) { return x < Rational(0) ? -x : x; }

}  // namespace qwalk
