#include "wbst/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace wbst {

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double tol) {
  using boost::math::quadrature::gauss_kronrod;
  QuadratureResult r;
  r.value = gauss_kronrod<double, 31>::integrate(f, a, b, 15, tol, &r.error_estimate);
  return r;
}

std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& f,
                                       double a, double b, double tol) {
  const double re = integrate([&](double x) { return f(x).real(); }, a, b, tol).value;
  const double im = integrate([&](double x) { return f(x).imag(); }, a, b, tol).value;
  return {re, im};
}

}  // namespace wbst
