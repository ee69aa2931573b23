#include "qwalk/faddeeva.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace qwalk {

namespace {

constexpr int kTerms = 40;

struct Coefficients {
    double L;
    std::array<double, kTerms> a;  // a[n-1] multiplies Z^(n-1)
};

Coefficients build() {
    Coefficients c{};
    const int M = 2 * kTerms;
    const int M2 = 2 * M;
    c.L = std::sqrt(kTerms / std::numbers::sqrt2);
    // f on theta_k = k pi / M, k = -M+1..M-1, with a leading zero
    std::array<double, 2 * M> f{};
    f[0] = 0.0;
    for (int k = -M + 1; k <= M - 1; ++k) {
        const double t = c.L * std::tan(k * std::numbers::pi / (2.0 * M));
        f[static_cast<std::size_t>(k + M)] = std::exp(-t * t) * (c.L * c.L + t * t);
    }
    // fftshift then real part of the DFT
    std::array<double, 2 * M> g{};
    for (int j = 0; j < M2; ++j) g[static_cast<std::size_t>(j)] = f[static_cast<std::size_t>((j + M) % M2)];
    for (int n = 1; n <= kTerms; ++n) {
        double re = 0.0;
        for (int j = 0; j < M2; ++j) re += g[static_cast<std::size_t>(j)] * std::cos(2.0 * std::numbers::pi * j * n / M2);
        c.a[static_cast<std::size_t>(n - 1)] = re / M2;
    }
    return c;
}

const Coefficients& coefficients() {
    static const Coefficients c = build();
    return c;
}

std::complex<double> upper(std::complex<double> z) {
    const auto& c = coefficients();
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> den = c.L - i * z;
    const std::complex<double> Z = (c.L + i * z) / den;
    std::complex<double> p = 0.0;
    for (int n = kTerms - 1; n >= 0; --n) p = p * Z + c.a[static_cast<std::size_t>(n)];
    return 2.0 * p / (den * den) + (1.0 / std::sqrt(std::numbers::pi)) / den;
}

}  // namespace

std::complex<double> faddeeva(std::complex<double> z) {
    if (z.imag() >= 0.0) return upper(z);
    return 2.0 * std::exp(-z * z) - upper(-z);
}

std::complex<double> erfcx(std::complex<double> z) { return faddeeva(std::complex<double>(0.0, 1.0) * z); }

std::complex<double> erfc(std::complex<double> z) { return std::exp(-z * z) * erfcx(z); }

}  // namespace qwalk
