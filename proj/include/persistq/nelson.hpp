#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "persistq/dirac.hpp"
#include "persistq/grid.hpp"

namespace persistq::nelson {

using cplx = std::complex<double>;

/// Density rho, log-amplitude R, phase S, external potential V and energy E
/// for a stationary state on a 1D grid (periodic, open, or radial). The mask
/// marks node neighbourhoods where R and Q are not evaluated.
struct StationaryState {
  Grid1D grid;
  std::vector<double> rho;
  std::vector<double> r_log;
  std::vector<double> s_phase;
  std::vector<double> v_potential;
  double energy = 0.0;
  double mass = 1.0;
  double hbar = 1.0;
  std::vector<std::uint8_t> mask;  // 1 = masked (node region)
  int winding = 0;
};

/// Node regions: cells with rho < 1e-8 max(rho), plus local minima whose
/// depth is consistent with a zero crossing between samples (rho_min below a
/// quarter of its own second difference), dilated by two cells.
std::vector<std::uint8_t> node_mask(std::span<const double> rho, const Grid1D& grid);

struct PolarParts {
  std::vector<double> rho;
  std::vector<double> r_log;    // masked entries are NaN
  std::vector<double> s_phase;  // hbar * unwrapped phase
  std::vector<std::uint8_t> mask;
  int winding = 0;  // phase winding number around a periodic grid
};

/// rho = |psi|^2, R = log(rho)/2 off-node, S = hbar * unwrapped arg(psi).
PolarParts polar_decompose(std::span<const cplx> psi, const Grid1D& grid, double hbar = 1.0);

/// u = (hbar/2m) d(log rho)/dx; masked entries NaN.
std::vector<double> osmotic_velocity(std::span<const double> rho, double mass, double hbar,
                                     const Grid1D& grid);
std::vector<double> osmotic_velocity(std::span<const double> rho, double mass, double hbar,
                                     const Grid1D& grid, std::span<const std::uint8_t> mask);

/// v = dS/dx / m.
std::vector<double> current_velocity(std::span<const double> s_phase, double mass,
                                     const Grid1D& grid);

/// Current and osmotic velocities of one state, with nu = hbar / 2m.
struct VelocityFields {
  std::vector<double> v;
  std::vector<double> u;
  double nu = 0.0;
};

VelocityFields velocity_fields(std::span<const double> rho, std::span<const double> s_phase,
                               double mass, double hbar, const Grid1D& grid);

/// Q = -(hbar^2/2m) lap(sqrt(rho))/sqrt(rho); masked entries NaN. Radial
/// grids use the three-dimensional radial Laplacian f'' + (2/r) f'.
std::vector<double> quantum_potential(std::span<const double> rho, double mass, double hbar,
                                      const Grid1D& grid);

/// Q = -(m/2) u^2 - (hbar/2) div u (radial: du/dr + 2u/r). NaN inputs in u
/// propagate to the masked outputs.
std::vector<double> quantum_potential_from_u(std::span<const double> u, double mass, double hbar,
                                             const Grid1D& grid);

struct BalanceResidual {
  std::vector<double> field;  // V + Q - E, NaN on the mask
  double max_abs = 0.0;       // over unmasked cells
  double mask_fraction = 0.0;
};

/// Stationary Hamilton-Jacobi balance V + Q - E.
BalanceResidual stationarity_residual(const StationaryState& state);

/// Differentiation backends: spectral on periodic grids, fourth-order central
/// differences with one-sided closures on open/radial grids.
std::vector<double> derivative(std::span<const double> f, const Grid1D& grid);
std::vector<double> second_derivative(std::span<const double> f, const Grid1D& grid);

struct GordonCurrents {
  // Index 0: time component, 1: spatial component; one value per grid cell.
  std::vector<double> total[2];
  std::vector<double> convective[2];
  std::vector<double> spin[2];
  double max_residual = 0.0;  // max |convective + spin - total| over cells
};

/// Gordon decomposition of the (1+1)D Dirac current built from the two-sector
/// algebra alpha = sigma3, beta = sigma1 (gamma0 = sigma1, gamma1 = sigma1
/// sigma3). Time derivatives are supplied by the free Dirac equation, so the
/// input snapshot is treated as on-shell Cauchy data.
GordonCurrents gordon_decompose(const dirac::WeylSpinorField1D& field,
                                const dirac::DiracParams& params);

}  // namespace persistq::nelson
