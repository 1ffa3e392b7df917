#include "wmlab/gauss.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace wmlab {

namespace {

QuadratureRule golub_welsch(const Eigen::VectorXd &diag, const Eigen::VectorXd &offdiag, double mu0) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw std::runtime_error("Golub-Welsch eigen solve failed");
  const auto n = diag.size();
  QuadratureRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    r.nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    r.weights[i] = mu0 * v0 * v0;
  }
  return r;
}

}  // namespace

QuadratureRule gauss_jacobi(std::size_t n, double alpha, double beta) {
  if (n == 0) throw std::invalid_argument("quadrature order must be positive");
  if (!(alpha > -1.0 && beta > -1.0)) throw std::invalid_argument("Jacobi parameters must exceed -1");
  const double ab = alpha + beta;
  Eigen::VectorXd a(n), b(n > 1 ? n - 1 : 0);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = 2.0 * k + ab;
    if (k == 0)
      a(0) = (beta - alpha) / (ab + 2.0);
    else
      a(k) = (beta * beta - alpha * alpha) / (s * (s + 2.0));
  }
  for (std::size_t k = 1; k < n; ++k) {
    const double s = 2.0 * k + ab;
    double b2;
    if (k == 1)
      b2 = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    else
      b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
    b(k - 1) = std::sqrt(b2);
  }
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                              std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));
  return golub_welsch(a, b, mu0);
}

QuadratureRule gauss_legendre(std::size_t n) {
  static std::mutex m;
  static std::map<std::size_t, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  return cache.emplace(n, gauss_jacobi(n, 0.0, 0.0)).first->second;
}

QuadratureRule map_rule(const QuadratureRule &r, double a, double b) {
  QuadratureRule out = r;
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    out.nodes[i] = mid + half * r.nodes[i];
    out.weights[i] = half * r.weights[i];
  }
  return out;
}

}  // namespace wmlab
