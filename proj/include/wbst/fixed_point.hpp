#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wbst {

// Limit vector Z = (weighted Wiener, Wiener, weighted path length, path length).
inline constexpr int z_dim = 4;
inline constexpr std::array<const char*, z_dim> z_names = {"ww", "w", "wp", "p"};

using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

struct CoefficientFunctions {
  double u = 0.0;
  Mat4 a1;
  Mat4 a2;
  Vec4 c;
};

// Coefficients of the limit map Z = A1 Z' + A2 Z'' + C at U = u, u in (0,1).
CoefficientFunctions eval_coefficients(double u);

// ||A||_op is the spectral radius (largest eigenvalue modulus).
double spectral_radius(const Mat4& m);
// Largest singular value.
double spectral_norm(const Mat4& m);

struct ContractionReport {
  double analytic = 2.0 / 3.0;  // E[U^2] + E[(1-U)^2]
  double numeric = 0.0;         // quadrature of ||A1||_op^2 + ||A2||_op^2
  double max_norm_gap = 0.0;    // grid max of | ||A1(u)||_op - u | and | ||A2(u)||_op - (1-u) |
  // Quadrature of the largest eigenvalues of A1 A1^T and A2 A2^T, i.e. the
  // squared singular-value norms. Exceeds the sum above but stays below 1.
  double gram_bound = 0.0;
  std::size_t grid_points = 0;
  bool holds() const { return analytic < 1.0 && numeric < 1.0 && gram_bound < 1.0; }
};

ContractionReport contraction_check(std::size_t grid_points = 999, double quad_tol = 1e-12);

// Componentwise integral of C over (0, 1).
Vec4 integrate_offset(double quad_tol = 1e-12);

struct MomentSystem {
  Mat4 m = Mat4::Zero();
  double quad_tol = 0.0;
  double residual = 0.0;  // max-norm of M - E[A1 M A1^T] - E[A2 M A2^T] - E[C C^T]
  bool positive_definite = false;
};

// Direct solve of the ten-unknown linear system for the symmetric second
// moment matrix of Z. Throws DomainError if the system is singular.
MomentSystem solve_second_moments(double quad_tol = 1e-12);

struct ConstantRow {
  std::string name;
  int i = 0;
  int j = 0;
  double computed = 0.0;
  double target = 0.0;
  double abs_error = 0.0;
  int natural_power = 0;  // n-power implied by the normalisation of Z
  int printed_power = 0;  // n-power of the published asymptotic
  bool matches = false;
};

inline constexpr double constant_tolerance = 1e-6;

// Four variances followed by the six covariances.
std::vector<ConstantRow> covariance_report(const MomentSystem& system,
                                           double tolerance = constant_tolerance);

std::string constants_csv(const std::vector<ConstantRow>& rows);
std::string constants_json(const MomentSystem& system, const std::vector<ConstantRow>& rows,
                           const ContractionReport& contraction, const Vec4& offset_integral);

}  // namespace wbst
