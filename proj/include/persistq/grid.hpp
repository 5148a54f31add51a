#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "persistq/errors.hpp"

namespace persistq {

enum class Boundary { periodic, open, radial };

/// Uniform 1D grid. Periodic grids have period n*dx (the point at
/// origin + n*dx is identified with the origin); open and radial grids
/// include both endpoints, so their span is (n-1)*dx.
struct Grid1D {
  int n = 0;
  double dx = 0.0;
  double origin = 0.0;
  Boundary boundary = Boundary::periodic;

  double x(int j) const { return origin + j * dx; }
  double length() const { return boundary == Boundary::periodic ? n * dx : (n - 1) * dx; }

  static Grid1D periodic(int n, double length, double origin = 0.0) {
    if (n < 2 || length <= 0.0) throw ValidationError("Grid1D::periodic: need n >= 2 and length > 0");
    return Grid1D{n, length / n, origin, Boundary::periodic};
  }
  static Grid1D open(int n, double x_lo, double x_hi) {
    if (n < 8 || x_hi <= x_lo) throw ValidationError("Grid1D::open: need n >= 8 and x_hi > x_lo");
    return Grid1D{n, (x_hi - x_lo) / (n - 1), x_lo, Boundary::open};
  }
  static Grid1D radial(int n, double r_lo, double r_hi) {
    if (n < 8 || r_lo <= 0.0 || r_hi <= r_lo)
      throw ValidationError("Grid1D::radial: need n >= 8 and 0 < r_lo < r_hi");
    return Grid1D{n, (r_hi - r_lo) / (n - 1), r_lo, Boundary::radial};
  }

  bool operator==(const Grid1D&) const = default;
};

/// Periodic uniform 3D grid.
struct Grid3D {
  std::array<int, 3> n{0, 0, 0};
  std::array<double, 3> d{0.0, 0.0, 0.0};

  std::size_t size() const {
    return static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(n[1]) *
           static_cast<std::size_t>(n[2]);
  }
  // Row-major: x slowest, z fastest.
  std::size_t index(int ix, int iy, int iz) const {
    return (static_cast<std::size_t>(ix) * n[1] + iy) * n[2] + iz;
  }
  double cell_volume() const { return d[0] * d[1] * d[2]; }
  double length(int axis) const { return n[axis] * d[axis]; }

  static Grid3D periodic(std::array<int, 3> n, std::array<double, 3> lengths) {
    for (int a = 0; a < 3; ++a)
      if (n[a] < 2 || lengths[a] <= 0.0)
        throw ValidationError("Grid3D::periodic: need n >= 2 and length > 0 on every axis");
    return Grid3D{n, {lengths[0] / n[0], lengths[1] / n[1], lengths[2] / n[2]}};
  }

  bool operator==(const Grid3D&) const = default;
};

/// Angular wavenumbers in FFT bin order: k_j = 2*pi*j/(n*dx) with
/// j = 0, 1, ..., n/2-1, -n/2, ..., -1.
inline std::vector<double> fft_wavenumbers(int n, double dx) {
  std::vector<double> k(static_cast<std::size_t>(n));
  const double dk = 2.0 * 3.14159265358979323846 / (n * dx);
  for (int j = 0; j < n; ++j) k[j] = dk * (j < (n + 1) / 2 ? j : j - n);
  return k;
}

}  // namespace persistq
