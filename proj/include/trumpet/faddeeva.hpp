#pragma once

// Faddeeva function w(z) = exp(-z^2) erfc(-iz) on the closed upper half
// plane, the kernel behind Voigt line shapes. Target accuracy is well below
// 1e-6 relative everywhere (observed ~1e-13 against independent quadrature).

#include <complex>

namespace trumpet {

// w(z) for Im(z) >= 0. Throws NumericalError for Im(z) < 0.
std::complex<double> faddeeva_w(std::complex<double> z);

// Analytic derivative w'(z) = -2 z w(z) + 2i/sqrt(pi).
std::complex<double> faddeeva_w_derivative(std::complex<double> z);

// Dawson integral F(x) = exp(-x^2) * integral_0^x exp(t^2) dt; supplies the
// real-axis limit Im w(x) = 2 F(x)/sqrt(pi).
double dawson(double x);

}  // namespace trumpet
