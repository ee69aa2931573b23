#pragma once

#include <complex>

namespace qwalk {

// Faddeeva function w(z) = exp(-z^2) erfc(-iz), rational approximation in the
// upper half plane and reflection below it.
std::complex<double> faddeeva(std::complex<double> z);

// exp(z^2) erfc(z), evaluated without overflow for large Re z.
std::complex<double> erfcx(std::complex<double> z);

std::complex<double> erfc(std::complex<double> z);

}  // namespace qwalk
