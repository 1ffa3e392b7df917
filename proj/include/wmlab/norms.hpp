#ifndef WMLAB_NORMS_HPP_
#define WMLAB_NORMS_HPP_

#include <cstdint>
#include <random>
#include <string>

#include "wmlab/polynomial.hpp"
#include "wmlab/state.hpp"

namespace wmlab {

/// Free part of the linearised operator,
/// (-rho u1' - u1 + u2, u1'' + (4/rho) u1' - rho u2' - 2 u2).
template <typename T>
BasicStatePair<T> apply_L0tilde(const BasicStatePair<T> &s);
/// Full linearisation at the profile: adds 16/(1+rho^2)^2 u1 to the second slot.
template <typename T>
BasicStatePair<T> apply_L(const BasicStatePair<T> &s);

/// \int u1' v1' rho^4 + \int u2 v2 rho^4 + u1(1) v1(1).
template <typename T>
Complex energy_E1(const BasicStatePair<T> &u, const BasicStatePair<T> &v);
/// 8 \int u1'' v1'' rho^4 + 32 \int u1' v1' rho^2 + 8 \int u2' v2' rho^4 + u1(1) v1(1) + u2(1) v2(1).
/// The u2' weight must match the u1'' weight for the cross terms of L0 to
/// cancel; with weight 2 the bound Re(L0 u, u) <= -1/2 |u|^2 fails.
template <typename T>
Complex energy_E2(const BasicStatePair<T> &u, const BasicStatePair<T> &v);

/// sqrt of sum_j \int |d^j u1|^2 rho^4 (j <= level) + \int |d^j u2|^2 rho^4 (j < level).
double sobolev_norm(const StatePair &s, int level);
/// (\int |f|^p rho^4)^(1/p); p = infinity gives the nodal maximum.
double lp_norm(const RadialField &f, double p);
double w1p_seminorm(const RadialField &f, double p);
/// Geometric mean of the H1xL2 and H2xH1 norms.
double h32_proxy(const StatePair &s);

enum class EnergyForm { E1, E2 };

/// Polynomial state used for exact evaluation of the energy forms.
struct PolyState {
  Polynomial u1;
  Polynomial u2;
};

PolyState apply_L0tilde(const PolyState &s);
double energy(EnergyForm form, const PolyState &u, const PolyState &v);
/// Growth bound minus Re(L0 u, u): 1/2 |u|^2 - Re(.) for E1, -1/2 |u|^2 - Re(.) for E2.
double dissipativity_margin(EnergyForm form, const PolyState &u);
double dissipativity_margin(EnergyForm form, const StatePair &u);

/// Random even polynomial of degree <= 2 * half_degree, coefficients uniform in [-1, 1].
template <typename Rng>
Polynomial random_even_polynomial(Rng &rng, int half_degree = 4);

struct PropertyReport {
  std::string name;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double value = 0.0;  // min margin or max ratio
  bool pass = false;
};

PropertyReport dissipativity_check(EnergyForm form, std::size_t samples, std::uint64_t seed,
                                   double tolerance = 1e-10);

struct HardyReport {
  double ratio_h1 = 0.0;    // max |rho^-1 f| / |f|_H1
  double ratio_h2 = 0.0;    // max |rho^-2 f| / |f|_H2
  double ratio_h2_d = 0.0;  // max |rho^-1 f'| / |f|_H2
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double max_ratio() const;
};

HardyReport hardy_ratios(const RadialField &f);
HardyReport hardy_checks(std::size_t samples, std::uint64_t seed, std::size_t n = 513);

/// Range of |s|_E1 / |s|_{H1xL2} over random polynomial states.
struct RatioRange {
  double lo = 0.0;
  double hi = 0.0;
};
RatioRange norm_equivalence_ratios(std::size_t samples, std::uint64_t seed, std::size_t n = 513);

StatePair sample_poly_state(const GridPtr &grid, const PolyState &p);

template <typename Rng>
Polynomial random_even_polynomial(Rng &rng, int half_degree) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> c(2 * half_degree + 1, 0.0);
  for (int k = 0; k <= half_degree; ++k) c[2 * k] = dist(rng);
  return Polynomial(std::move(c));
}

}  // namespace wmlab

#endif  // WMLAB_NORMS_HPP_
