#include "wbst/fixed_point.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "wbst/errors.hpp"
#include "wbst/quadrature.hpp"

namespace wbst {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Also valid (by continuity) at the endpoints; used inside quadratures.
CoefficientFunctions coefficients_unchecked(double u) {
  const double v = 1.0 - u;
  const double lu = u > 0.0 ? std::log(u) : 0.0;
  const double lv = v > 0.0 ? std::log(v) : 0.0;
  CoefficientFunctions cf;
  cf.u = u;
  cf.a1 << u * u * u, 0.0, u * u * v, 0.0,
           0.0, u * u, 0.0, u * v,
           0.0, 0.0, u * u, 0.0,
           0.0, 0.0, 0.0, u;
  cf.a2 << v * v * v, u * v * v, u * v * v, u * u * v,
           0.0, v * v, 0.0, u * v,
           0.0, 0.0, v * v, u * v,
           0.0, 0.0, 0.0, v;
  const double entropy_sq = u * u * lu + (1.0 - u * u) * lv;
  const double entropy = 2.0 * xlogx(u) + 2.0 * xlogx(v);
  cf.c << entropy_sq + u * (-14.0 * u * u + 9.0 * u + 5.0) / 4.0,
          entropy + 6.0 * u * v,
          entropy_sq + u,
          entropy + 1.0;
  return cf;
}

// Index pairs (i <= j) of the ten unknowns.
constexpr std::array<std::pair<int, int>, 10> unknowns = {{
    {0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 1}, {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 3}}};

}  // namespace

CoefficientFunctions eval_coefficients(double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("eval_coefficients: u must lie in (0,1)");
  return coefficients_unchecked(u);
}

double spectral_radius(const Mat4& m) {
  Eigen::EigenSolver<Mat4> solver(m, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_norm(const Mat4& m) {
  Eigen::SelfAdjointEigenSolver<Mat4> solver(m.transpose() * m, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

ContractionReport contraction_check(std::size_t grid_points, double quad_tol) {
  ContractionReport r;
  r.grid_points = grid_points;
  for (std::size_t g = 1; g <= grid_points; ++g) {
    const double u = static_cast<double>(g) / static_cast<double>(grid_points + 1);
    const auto cf = coefficients_unchecked(u);
    r.max_norm_gap = std::max({r.max_norm_gap, std::abs(spectral_radius(cf.a1) - u),
                               std::abs(spectral_radius(cf.a2) - (1.0 - u))});
  }
  r.numeric = integrate(
                  [](double u) {
                    const auto cf = coefficients_unchecked(u);
                    const double r1 = spectral_radius(cf.a1);
                    const double r2 = spectral_radius(cf.a2);
                    return r1 * r1 + r2 * r2;
                  },
                  0.0, 1.0, quad_tol)
                  .value;
  r.gram_bound = integrate(
                     [](double u) {
                       const auto cf = coefficients_unchecked(u);
                       return spectral_radius(cf.a1 * cf.a1.transpose()) +
                              spectral_radius(cf.a2 * cf.a2.transpose());
                     },
                     0.0, 1.0, 1e-10)
                     .value;
  return r;
}

Vec4 integrate_offset(double quad_tol) {
  Vec4 out;
  for (int i = 0; i < z_dim; ++i) {
    out(i) = integrate([i](double u) { return coefficients_unchecked(u).c(i); }, 0.0, 1.0,
                       quad_tol)
                 .value;
  }
  return out;
}

MomentSystem solve_second_moments(double quad_tol) {
  if (!(quad_tol > 0.0)) throw InvalidInput("solve_second_moments: quad_tol must be positive");
  // kernel(i,j,k,l) = E[A1_ik A1_jl + A2_ik A2_jl], so L(M)_ij = sum_kl kernel * M_kl.
  std::array<double, 256> kernel{};
  for (int a = 0; a < 16; ++a) {
    for (int b = 0; b < 16; ++b) {
      const int i = a / 4, j = a % 4, k = b / 4, l = b % 4;
      kernel[static_cast<std::size_t>(a * 16 + b)] =
          integrate(
              [=](double u) {
                const auto cf = coefficients_unchecked(u);
                return cf.a1(i, k) * cf.a1(j, l) + cf.a2(i, k) * cf.a2(j, l);
              },
              0.0, 1.0, quad_tol)
              .value;
    }
  }
  Mat4 ecc;
  for (int i = 0; i < z_dim; ++i) {
    for (int j = i; j < z_dim; ++j) {
      ecc(i, j) = integrate(
                      [=](double u) {
                        const auto cf = coefficients_unchecked(u);
                        return cf.c(i) * cf.c(j);
                      },
                      0.0, 1.0, quad_tol)
                      .value;
      ecc(j, i) = ecc(i, j);
    }
  }

  Eigen::Matrix<double, 10, 10> lhs = Eigen::Matrix<double, 10, 10>::Identity();
  Eigen::Matrix<double, 10, 1> rhs;
  for (std::size_t r = 0; r < unknowns.size(); ++r) {
    const auto [i, j] = unknowns[r];
    rhs(static_cast<int>(r)) = ecc(i, j);
    for (std::size_t c = 0; c < unknowns.size(); ++c) {
      const auto [k, l] = unknowns[c];
      double coef = kernel[static_cast<std::size_t>((i * 4 + j) * 16 + k * 4 + l)];
      if (k != l) coef += kernel[static_cast<std::size_t>((i * 4 + j) * 16 + l * 4 + k)];
      lhs(static_cast<int>(r), static_cast<int>(c)) -= coef;
    }
  }
  Eigen::FullPivLU<Eigen::Matrix<double, 10, 10>> lu(lhs);
  if (!lu.isInvertible()) throw DomainError("solve_second_moments: singular moment system");
  const Eigen::Matrix<double, 10, 1> sol = lu.solve(rhs);

  MomentSystem sys;
  sys.quad_tol = quad_tol;
  for (std::size_t r = 0; r < unknowns.size(); ++r) {
    const auto [i, j] = unknowns[r];
    sys.m(i, j) = sys.m(j, i) = sol(static_cast<int>(r));
  }

  // Certificate: integrate the full right-hand side afresh with M plugged in.
  const Mat4 m = sys.m;
  double residual = 0.0;
  for (int i = 0; i < z_dim; ++i) {
    for (int j = i; j < z_dim; ++j) {
      const double image = integrate(
                               [&m, i, j](double u) {
                                 const auto cf = coefficients_unchecked(u);
                                 const Mat4 t = cf.a1 * m * cf.a1.transpose() +
                                                cf.a2 * m * cf.a2.transpose() +
                                                cf.c * cf.c.transpose();
                                 return t(i, j);
                               },
                               0.0, 1.0, quad_tol)
                               .value;
      residual = std::max(residual, std::abs(m(i, j) - image));
    }
  }
  sys.residual = residual;
  Eigen::LLT<Mat4> llt(sys.m);
  sys.positive_definite = llt.info() == Eigen::Success;
  return sys;
}

std::vector<ConstantRow> covariance_report(const MomentSystem& system, double tolerance) {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  struct Target {
    const char* name;
    int i, j;
    double value;
    int printed_power;
  };
  const Target targets[] = {
      {"Var(ww)", 0, 0, (2413.0 - 240.0 * pi2) / 1440.0, 4},
      {"Var(w)", 1, 1, (20.0 - 2.0 * pi2) / 3.0, 4},
      {"Var(wp)", 2, 2, (65.0 - 6.0 * pi2) / 36.0, 2},
      {"Var(p)", 3, 3, (21.0 - 2.0 * pi2) / 3.0, 2},
      {"Cov(p,wp)", 3, 2, (21.0 - 2.0 * pi2) / 6.0, 2},
      {"Cov(p,w)", 3, 1, (20.0 - 2.0 * pi2) / 3.0, 3},
      {"Cov(wp,w)", 2, 1, (10.0 - pi2) / 3.0, 3},
      {"Cov(p,ww)", 3, 0, (10.0 - pi2) / 3.0, 3},
      {"Cov(w,ww)", 1, 0, (10.0 - pi2) / 3.0, 4},
      {"Cov(wp,ww)", 2, 0, (481.0 - 48.0 * pi2) / 288.0, 3},
  };
  constexpr int norm_power[z_dim] = {2, 2, 1, 1};
  std::vector<ConstantRow> rows;
  for (const auto& t : targets) {
    ConstantRow row;
    row.name = t.name;
    row.i = t.i;
    row.j = t.j;
    row.computed = system.m(t.i, t.j);
    row.target = t.value;
    row.abs_error = std::abs(row.computed - row.target);
    row.natural_power = norm_power[t.i] + norm_power[t.j];
    row.printed_power = t.printed_power;
    row.matches = row.abs_error <= tolerance;
    rows.push_back(row);
  }
  return rows;
}

std::string constants_csv(const std::vector<ConstantRow>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "name,computed,target,abs_error,natural_power,printed_power,matches\r\n";
  for (const auto& r : rows) {
    out << r.name << ',' << r.computed << ',' << r.target << ',' << r.abs_error << ','
        << r.natural_power << ',' << r.printed_power << ',' << (r.matches ? "true" : "false")
        << "\r\n";
  }
  return out.str();
}

std::string constants_json(const MomentSystem& system, const std::vector<ConstantRow>& rows,
                           const ContractionReport& contraction, const Vec4& offset_integral) {
  nlohmann::json j;
  j["quad_tol"] = system.quad_tol;
  j["residual"] = system.residual;
  j["positive_definite"] = system.positive_definite;
  j["contraction"] = {{"analytic", contraction.analytic},
                      {"numeric", contraction.numeric},
                      {"max_norm_gap", contraction.max_norm_gap},
                      {"gram_bound", contraction.gram_bound}};
  j["offset_integral"] = std::vector<double>(offset_integral.data(), offset_integral.data() + 4);
  auto& arr = j["constants"] = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"name", r.name},
                   {"computed", r.computed},
                   {"target", r.target},
                   {"abs_error", r.abs_error},
                   {"natural_power", r.natural_power},
                   {"printed_power", r.printed_power},
                   {"matches", r.matches}});
  }
  return j.dump(2);
}

}  // namespace wbst
