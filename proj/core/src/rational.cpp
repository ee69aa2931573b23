#include "qwalk/rational.hpp"

#include <charconv>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string_view>

namespace qwalk {
namespace {

__int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 r = a % b;
        a = b;
        b = r;
    }
    return a;
}

bool fits(__int128 v) {
    return v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max();
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
    *this = reduce(num, den);
}

Rational Rational::reduce(__int128 num, __int128 den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    __int128 g = gcd128(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    if (!fits(num) || !fits(den)) throw std::overflow_error("rational overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(num);
    r.den_ = static_cast<std::int64_t>(den);
    return r;
}

Rational Rational::parse(const std::string& text) {
    auto integer = [&](std::string_view part) {
        std::int64_t v = 0;
        const char* first = part.data();
        if (!part.empty() && part.front() == '+') ++first;
        const auto [ptr, ec] = std::from_chars(first, part.data() + part.size(), v);
        if (ec != std::errc() || ptr != part.data() + part.size() || first == ptr) {
            throw std::invalid_argument("bad rational literal: " + text);
        }
        return v;
    };
    const std::string_view view(text);
    if (auto slash = view.find('/'); slash != std::string_view::npos) {
        return Rational(integer(view.substr(0, slash)), integer(view.substr(slash + 1)));
    }
    auto dot = view.find('.');
    if (dot == std::string_view::npos) return Rational(integer(view));
    const std::size_t decimals = view.size() - dot - 1;
    if (decimals == 0 || decimals > 18) throw std::invalid_argument("bad rational literal: " + text);
    const std::string digits = std::string(view.substr(0, dot)) + std::string(view.substr(dot + 1));
    if (digits.find_first_of("+-", 1) != std::string::npos) throw std::invalid_argument("bad rational literal: " + text);
    std::int64_t den = 1;
    for (std::size_t i = 0; i < decimals; ++i) den *= 10;
    return Rational(integer(digits), den);
}

std::int64_t Rational::floor() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
}

Rational Rational::operator-() const {
    return reduce(-static_cast<__int128>(num_), den_);
}

Rational& Rational::operator+=(const Rational& o) {
    *this = reduce(static_cast<__int128>(num_) * o.den_ + static_cast<__int128>(o.num_) * den_,
                   static_cast<__int128>(den_) * o.den_);
    return *this;
}

Rational& Rational::operator-=(const Rational& o) {
    *this = reduce(static_cast<__int128>(num_) * o.den_ - static_cast<__int128>(o.num_) * den_,
                   static_cast<__int128>(den_) * o.den_);
    return *this;
}

Rational& Rational::operator*=(const Rational& o) {
    *this = reduce(static_cast<__int128>(num_) * o.num_, static_cast<__int128>(den_) * o.den_);
    return *this;
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.num_ == 0) throw std::domain_error("rational division by zero");
    *this = reduce(static_cast<__int128>(num_) * o.den_, static_cast<__int128>(den_) * o.num_);
    return *this;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    __int128 l = static_cast<__int128>(a.num_) * b.den_;
    __int128 r = static_cast<__int128>(b.num_) * a.den_;
    if (l < r) return std::strong_ordering::less;
    if (l > r) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.str();
}

}  // namespace qwalk
