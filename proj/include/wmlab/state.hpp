#ifndef WMLAB_STATE_HPP_
#define WMLAB_STATE_HPP_

#include "wmlab/grid.hpp"

namespace wmlab {

/// A point (psi1, psi2) of the first-order system at similarity time tau.
template <typename T>
struct BasicStatePair {
  double tau = 0.0;
  BasicRadialField<T> psi1;
  BasicRadialField<T> psi2;

  const GridPtr &grid_ptr() const { return psi1.grid_ptr(); }
  const Grid &grid() const { return psi1.grid(); }
};

using StatePair = BasicStatePair<double>;
using ComplexStatePair = BasicStatePair<Complex>;

/// (Psi1*, Psi2*) sampled on the grid.
StatePair profile_state(const GridPtr &grid);
/// (g1, g2) sampled on the grid.
StatePair eigenmode_state(const GridPtr &grid);

}  // namespace wmlab

#endif  // WMLAB_STATE_HPP_
