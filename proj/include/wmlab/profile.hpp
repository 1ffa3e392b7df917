#ifndef WMLAB_PROFILE_HPP_
#define WMLAB_PROFILE_HPP_

#include <array>
#include <complex>
#include <utility>

namespace wmlab {

using Complex = std::complex<double>;

/// Components of the static self-similar profile.
struct ProfileValue {
  double psi1_star;
  double psi2_star;
};

/// arctanh via log1p, accurate near rho = 1.
double arctanh(double x);

/// Self-similar blowup solution (2/r) arctan(r/(T-t)).
double u_star(double T, double t, double r);

/// Static profile in similarity coordinates: (2 arctan(rho)/rho, 2/(1+rho^2)).
ProfileValue psi_star(double rho);
/// d/drho of the first profile component.
double psi1_star_derivative(double rho);

/// Corotational map into S^3: (sin(r u) dir, cos(r u)).
std::array<double, 4> corotational_embed(double u, double r, const std::array<double, 3> &direction);

/// Unstable eigenfunction (1/(1+rho^2), 2/(1+rho^2)^2) for eigenvalue 1.
std::pair<double, double> eigenfunction_g(double rho);

/// Second solution of the eigenvalue-1 equation, singular at both ends.
double gtilde1(double rho);

/// Fundamental system (psi0, psi1) of the potential-free eigenvalue-1 equation.
std::pair<double, double> free_psi0_psi1(double rho);

/// Bessel-type closed-form solutions b_1, b_2 with a(lambda) = i(1 - lambda).
Complex bessel_b(int j, double rho, Complex lambda);

/// Free solutions sqrt(1-rho^2) ((1 -+ rho)/(1 +- rho))^{(1-lambda)/2}.
Complex free_w(int j, double rho, Complex lambda);

/// V(rho) = -16/(1+rho^2)^2.
double potential_V(double rho);
/// V_N(rho) = -16(1-rho^2)/(1+rho^2)^2.
double potential_VN(double rho);

/// Nonlinear remainder of the profile-linearised equation. Uses the direct
/// trigonometric formula away from the origin and the integral remainder form
/// for rho below the threshold.
double nonlinearity_N(double u, double rho, double threshold = 1e-2);
double nonlinearity_N_direct(double u, double rho);
double nonlinearity_N_taylor(double u, double rho);

}  // namespace wmlab

#endif  // WMLAB_PROFILE_HPP_
