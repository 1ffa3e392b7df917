#include "wmlab/profile.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wmlab/gauss.hpp"

namespace wmlab {

namespace {

void require_unit_interval(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::domain_error("rho outside [0, 1]");
}

// arctan(x)/x for any x, series near 0.
double arctan_over_x(double x) {
  if (std::abs(x) < 1e-2) {
    const double x2 = x * x;
    return 1.0 - x2 * (1.0 / 3.0 - x2 * (1.0 / 5.0 - x2 * (1.0 / 7.0 - x2 / 9.0)));
  }
  return std::atan(x) / x;
}

}  // namespace

double arctanh(double x) { return 0.5 * (std::log1p(x) - std::log1p(-x)); }

double u_star(double T, double t, double r) {
  if (!(t < T)) throw std::domain_error("u_star requires t < T");
  if (r < 0.0) throw std::domain_error("u_star requires r >= 0");
  const double s = T - t;
  return 2.0 / s * arctan_over_x(r / s);
}

ProfileValue psi_star(double rho) {
  require_unit_interval(rho);
  return {2.0 * arctan_over_x(rho), 2.0 / (1.0 + rho * rho)};
}

double psi1_star_derivative(double rho) {
  require_unit_interval(rho);
  if (rho < 1e-2) {
    const double r2 = rho * rho;
    return 2.0 * rho * (-2.0 / 3.0 + r2 * (4.0 / 5.0 - r2 * (6.0 / 7.0 - r2 * 8.0 / 9.0)));
  }
  return 2.0 / (rho * (1.0 + rho * rho)) - 2.0 * std::atan(rho) / (rho * rho);
}

std::array<double, 4> corotational_embed(double u, double r, const std::array<double, 3> &dir) {
  if (r < 0.0) throw std::domain_error("corotational_embed requires r >= 0");
  const double norm = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
  if (!(norm > 0.0)) throw std::invalid_argument("direction must be nonzero");
  const double s = std::sin(r * u) / norm;
  return {s * dir[0], s * dir[1], s * dir[2], std::cos(r * u)};
}

std::pair<double, double> eigenfunction_g(double rho) {
  const double q = 1.0 / (1.0 + rho * rho);
  return {q, 2.0 * q * q};
}

double gtilde1(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::domain_error("gtilde1 requires 0 < rho < 1");
  const double r2 = rho * rho;
  return (12.0 * r2 * rho * arctanh(rho) - 9.0 * r2 - 1.0) / (r2 * rho * (r2 + 1.0));
}

std::pair<double, double> free_psi0_psi1(double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw std::domain_error("free_psi0_psi1 requires 0 <= rho < 1");
  const double r2 = rho * rho;
  double psi0;
  if (rho < 0.3) {
    // sum_k rho^{2k} / (2k + 3); the direct form cancels badly near 0.
    psi0 = 0.0;
    for (int k = 24; k >= 0; --k) psi0 = psi0 * r2 + 1.0 / (2 * k + 3);
  } else {
    psi0 = (arctanh(rho) - rho) / (r2 * rho);
  }
  const double psi1 = rho > 0.0 ? 1.0 / (r2 * rho) : HUGE_VAL;
  return {psi0, psi1};
}

Complex bessel_b(int j, double rho, Complex lambda) {
  if (j != 1 && j != 2) throw std::invalid_argument("bessel_b index must be 1 or 2");
  if (!(rho >= 0.0 && rho < 1.0)) throw std::domain_error("bessel_b requires 0 <= rho < 1");
  const Complex a = Complex(0.0, 1.0) * (1.0 - lambda);
  if (a == 0.0) throw std::domain_error("bessel_b undefined at lambda = 1");
  const Complex x = a * arctanh(rho);
  const double amp = std::sqrt((1.0 - rho) * (1.0 + rho));
  if (j == 1) {
    if (std::abs(x) < 1e-2) {
      const Complex x2 = x * x;
      return amp * x2 * (1.0 / 3.0 - x2 * (1.0 / 30.0 - x2 * (1.0 / 840.0 - x2 / 45360.0)));
    }
    return amp * (std::sin(x) / x - std::cos(x));
  }
  if (rho == 0.0) return Complex(HUGE_VAL, 0.0);
  return amp * (std::sin(x) + std::cos(x) / x);
}

Complex free_w(int j, double rho, Complex lambda) {
  if (j != 1 && j != 2) throw std::invalid_argument("free_w index must be 1 or 2");
  if (!(rho >= 0.0 && rho < 1.0)) throw std::domain_error("free_w requires 0 <= rho < 1");
  const double amp = std::sqrt((1.0 - rho) * (1.0 + rho));
  const double sign = j == 1 ? -1.0 : 1.0;
  return amp * std::exp(sign * (1.0 - lambda) * arctanh(rho));
}

double potential_V(double rho) {
  const double q = 1.0 + rho * rho;
  return -16.0 / (q * q);
}

double potential_VN(double rho) { return potential_V(rho) * (1.0 - rho * rho); }

double nonlinearity_N_direct(double u, double rho) {
  if (!(rho > 0.0)) throw std::domain_error("direct nonlinearity needs rho > 0");
  const double a = 4.0 * std::atan(rho);
  const double x = 2.0 * rho * u;
  // sin(a + x) - sin(a) = 2 cos(a + x/2) sin(x/2) avoids one cancellation.
  const double dsin = 2.0 * std::cos(a + 0.5 * x) * std::sin(0.5 * x);
  const double q = 1.0 + rho * rho;
  return (dsin - x) / (rho * rho * rho) + 16.0 / (q * q) * u;
}

double nonlinearity_N_taylor(double u, double rho) {
  // Remainder of the second-order expansion of sin about 4 arctan(rho):
  // the quadratic coefficient is V_N/2, the cubic remainder is an integral.
  static const QuadratureRule gl = gauss_legendre(20);
  const double a = 4.0 * std::atan(rho);
  double integral = 0.0;
  for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
    const double s = 0.5 * (gl.nodes[k] + 1.0);
    const double t = u * s;
    integral += 0.5 * gl.weights[k] * std::cos(a + 2.0 * rho * t) * (1.0 - s) * (1.0 - s);
  }
  integral *= u * u * u;
  return 0.5 * potential_VN(rho) * u * u - 4.0 * integral;
}

double nonlinearity_N(double u, double rho, double threshold) {
  require_unit_interval(rho);
  if (rho < threshold) return nonlinearity_N_taylor(u, rho);
  return nonlinearity_N_direct(u, rho);
}

}  // namespace wmlab
