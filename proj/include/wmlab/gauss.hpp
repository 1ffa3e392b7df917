#ifndef WMLAB_GAUSS_HPP_
#define WMLAB_GAUSS_HPP_

#include <cstddef>
#include <vector>

namespace wmlab {

/// Nodes and weights of an interpolatory rule on [-1, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule.
QuadratureRule gauss_legendre(std::size_t n);

/// n-point Gauss-Jacobi rule for the weight (1-x)^alpha (1+x)^beta,
/// alpha, beta > -1, from the Golub-Welsch eigenvalue problem.
QuadratureRule gauss_jacobi(std::size_t n, double alpha, double beta);

/// Rule mapped to [a, b] (weights scaled by (b-a)/2).
QuadratureRule map_rule(const QuadratureRule &r, double a, double b);

}  // namespace wmlab

#endif  // WMLAB_GAUSS_HPP_
