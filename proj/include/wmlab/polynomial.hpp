#ifndef WMLAB_POLYNOMIAL_HPP_
#define WMLAB_POLYNOMIAL_HPP_

#include <cstddef>
#include <vector>

namespace wmlab {

/// Dense real polynomial, coefficient k multiplies rho^k.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {}

  std::size_t degree() const { return c_.empty() ? 0 : c_.size() - 1; }
  const std::vector<double> &coeffs() const { return c_; }
  double coeff(std::size_t k) const { return k < c_.size() ? c_[k] : 0.0; }

  double operator()(double x) const;
  Polynomial derivative() const;
  /// p(rho)/rho; the constant coefficient must vanish.
  Polynomial divide_by_x() const;
  Polynomial shift_up(std::size_t k) const;  // rho^k p
  /// \int_0^1 p(rho) rho^m drho.
  double moment(int m) const;

  Polynomial &operator+=(const Polynomial &o);
  Polynomial &operator*=(double s);
  friend Polynomial operator+(Polynomial a, const Polynomial &b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial &b) { return a += -1.0 * b; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial &a, const Polynomial &b);

 private:
  std::vector<double> c_;
};

}  // namespace wmlab

#endif  // WMLAB_POLYNOMIAL_HPP_
