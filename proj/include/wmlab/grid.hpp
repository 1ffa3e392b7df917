#ifndef WMLAB_GRID_HPP_
#define WMLAB_GRID_HPP_

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace wmlab {

using Complex = std::complex<double>;

/// Uniform radial grid rho_i = radius * i / (n - 1).
class Grid {
 public:
  explicit Grid(std::size_t n, double radius = 1.0);

  static std::shared_ptr<const Grid> make(std::size_t n, double radius = 1.0) {
    return std::make_shared<const Grid>(n, radius);
  }

  std::size_t size() const { return nodes_.size(); }
  double spacing() const { return spacing_; }
  double radius() const { return radius_; }
  double node(std::size_t i) const { return nodes_[i]; }
  std::span<const double> nodes() const { return nodes_; }

 private:
  double radius_;
  double spacing_;
  std::vector<double> nodes_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Behaviour of a field under rho -> -rho. Smooth radial functions are even.
enum class Parity { even, odd, none };

inline Parity flip(Parity p) {
  switch (p) {
    case Parity::even: return Parity::odd;
    case Parity::odd: return Parity::even;
    default: return Parity::none;
  }
}

class GridTooSmall : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Samples of a radial function on a Grid, with parity metadata for the
/// ghost extension at rho = 0.
template <typename T>
class BasicRadialField {
 public:
  using value_type = T;

  BasicRadialField() = default;
  BasicRadialField(GridPtr grid, std::vector<T> values, Parity parity = Parity::even)
      : grid_(std::move(grid)), values_(std::move(values)), parity_(parity) {
    if (!grid_ || values_.size() != grid_->size())
      throw std::invalid_argument("field size does not match grid");
  }
  BasicRadialField(GridPtr grid, Parity parity = Parity::even)
      : grid_(std::move(grid)), values_(grid_->size(), T{}), parity_(parity) {}

  static BasicRadialField sample(GridPtr grid, const std::function<T(double)> &fn,
                                 Parity parity = Parity::even) {
    std::vector<T> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid->node(i));
    return BasicRadialField(std::move(grid), std::move(v), parity);
  }

  const Grid &grid() const { return *grid_; }
  const GridPtr &grid_ptr() const { return grid_; }
  Parity parity() const { return parity_; }
  void set_parity(Parity p) { parity_ = p; }
  std::size_t size() const { return values_.size(); }

  T &operator[](std::size_t i) { return values_[i]; }
  const T &operator[](std::size_t i) const { return values_[i]; }
  std::span<const T> values() const { return values_; }
  std::span<T> values() { return values_; }

  BasicRadialField &operator+=(const BasicRadialField &o) {
    check_same(o);
    for (std::size_t i = 0; i < size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  BasicRadialField &operator-=(const BasicRadialField &o) {
    check_same(o);
    for (std::size_t i = 0; i < size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  BasicRadialField &operator*=(T c) {
    for (auto &v : values_) v *= c;
    return *this;
  }
  friend BasicRadialField operator+(BasicRadialField a, const BasicRadialField &b) { return a += b; }
  friend BasicRadialField operator-(BasicRadialField a, const BasicRadialField &b) { return a -= b; }
  friend BasicRadialField operator*(T c, BasicRadialField a) { return a *= c; }
  friend BasicRadialField operator*(BasicRadialField a, T c) { return a *= c; }

  /// Pointwise product; parities multiply.
  friend BasicRadialField operator*(const BasicRadialField &a, const BasicRadialField &b) {
    a.check_same(b);
    BasicRadialField r(a.grid_, product_parity(a.parity_, b.parity_));
    for (std::size_t i = 0; i < a.size(); ++i) r.values_[i] = a.values_[i] * b.values_[i];
    return r;
  }

 private:
  static Parity product_parity(Parity a, Parity b) {
    if (a == Parity::none || b == Parity::none) return Parity::none;
    return a == b ? Parity::even : Parity::odd;
  }
  void check_same(const BasicRadialField &o) const {
    if (grid_.get() != o.grid_.get() && (grid_->size() != o.grid_->size() ||
                                         grid_->radius() != o.grid_->radius()))
      throw std::invalid_argument("fields live on different grids");
  }

  GridPtr grid_;
  std::vector<T> values_;
  Parity parity_ = Parity::even;
};

using RadialField = BasicRadialField<double>;
using ComplexRadialField = BasicRadialField<Complex>;

// Fourth-order finite differences. At rho = 0 ghost nodes follow the field
// parity; at the outer edge one-sided stencils close the system.
template <typename T>
BasicRadialField<T> derivative(const BasicRadialField<T> &f);
template <typename T>
BasicRadialField<T> second_derivative(const BasicRadialField<T> &f);

/// Composite Simpson rule for \int_0^R f(rho) rho^k drho. Requires odd n.
template <typename T>
T quadrature(const BasicRadialField<T> &f, int weight_power);

/// Local four-point polynomial interpolation.
template <typename T>
T evaluate_at(const BasicRadialField<T> &f, double rho);

/// Finite difference weights for the m-th derivative at z from the given
/// offsets (Fornberg's recursion). Returned weights are per unit spacing.
std::vector<double> fd_weights(double z, std::span<const double> offsets, int m);

RadialField real_part(const ComplexRadialField &f);
RadialField imag_part(const ComplexRadialField &f);
ComplexRadialField to_complex(const RadialField &f);

extern template RadialField derivative(const RadialField &);
extern template ComplexRadialField derivative(const ComplexRadialField &);
extern template RadialField second_derivative(const RadialField &);
extern template ComplexRadialField second_derivative(const ComplexRadialField &);
extern template double quadrature(const RadialField &, int);
extern template Complex quadrature(const ComplexRadialField &, int);
extern template double evaluate_at(const RadialField &, double);
extern template Complex evaluate_at(const ComplexRadialField &, double);

}  // namespace wmlab

#endif  // WMLAB_GRID_HPP_
