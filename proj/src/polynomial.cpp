#include "wmlab/polynomial.hpp"

#include <stdexcept>

namespace wmlab {

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (std::size_t k = c_.size(); k-- > 0;) acc = acc * x + c_[k];
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial({0.0});
  std::vector<double> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::divide_by_x() const {
  if (c_.empty()) return {};
  if (c_[0] != 0.0) throw std::domain_error("polynomial not divisible by rho");
  return Polynomial(std::vector<double>(c_.begin() + 1, c_.end()));
}

Polynomial Polynomial::shift_up(std::size_t k) const {
  std::vector<double> d(k, 0.0);
  d.insert(d.end(), c_.begin(), c_.end());
  return Polynomial(std::move(d));
}

double Polynomial::moment(int m) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < c_.size(); ++k) acc += c_[k] / static_cast<double>(k + m + 1);
  return acc;
}

Polynomial &Polynomial::operator+=(const Polynomial &o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
  for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

Polynomial &Polynomial::operator*=(double s) {
  for (auto &v : c_) v *= s;
  return *this;
}

Polynomial operator*(const Polynomial &a, const Polynomial &b) {
  if (a.c_.empty() || b.c_.empty()) return {};
  std::vector<double> r(a.c_.size() + b.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
  return Polynomial(std::move(r));
}

}  // namespace wmlab
