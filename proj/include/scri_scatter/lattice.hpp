#ifndef SCRI_SCATTER_LATTICE_HPP
#define SCRI_SCATTER_LATTICE_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "scri_scatter/errors.hpp"

namespace scri {

// Uniform 1-D lattice with n_cells intervals, n_cells+1 nodes.
struct Lattice1D {
  double x0 = 0.0;
  double dx = 1.0;
  std::size_t n_cells = 0;

  Lattice1D() = default;
  Lattice1D(double lo, double hi, std::size_t cells)
      : x0(lo), dx((hi - lo) / double(cells)), n_cells(cells) {
    if (cells == 0 || !(hi > lo))
      throw ConfigError("Lattice1D: need hi > lo and cells > 0");
  }

  std::size_t n_points() const { return n_cells + 1; }
  double x(std::size_t i) const { return x0 + dx * double(i); }
  double lo() const { return x0; }
  double hi() const { return x0 + dx * double(n_cells); }
  bool contains(double v) const {
    const double eps = 1e-12 * (std::abs(lo()) + std::abs(hi()) + 1.0);
    return v >= lo() - eps && v <= hi() + eps;
  }
  bool symmetric() const {
    return std::abs(lo() + hi()) <= 1e-10 * (std::abs(lo()) + std::abs(hi()) + 1.0);
  }
  Lattice1D refined(std::size_t factor = 2) const {
    Lattice1D l = *this;
    l.n_cells = n_cells * factor;
    l.dx = dx / double(factor);
    return l;
  }
  std::vector<double> nodes() const {
    std::vector<double> v(n_points());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = x(i);
    return v;
  }
};

} // namespace scri

#endif
