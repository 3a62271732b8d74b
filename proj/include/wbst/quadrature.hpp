#pragma once

#include <complex>
#include <functional>

namespace wbst {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

// Adaptive Gauss-Kronrod (31 points) on [a, b]. The integrand is never
// evaluated at the endpoints.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double tol = 1e-12);

std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& f,
                                       double a, double b, double tol = 1e-12);

}  // namespace wbst
