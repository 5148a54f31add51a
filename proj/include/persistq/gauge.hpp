#pragma once

#include <functional>
#include <vector>

#include "persistq/dirac.hpp"
#include "persistq/grid.hpp"

namespace persistq::gauge {

/// Prescribed electromagnetic potential samples on the matter grid. A0 is in
/// frequency units and Ax in wavenumber units, matching D_t = d/dt + i e A0
/// and D_x = d/dx - i e A_x (natural units absorb hbar and c).
struct GaugeField1D {
  Grid1D grid;
  std::vector<double> a0;
  std::vector<double> ax;

  void validate() const;
  bool is_zero() const;
  static GaugeField1D zero(const Grid1D& grid);
};

/// Gauge function chi(x) (and optionally its time derivative) on the grid.
struct GaugeFunction {
  Grid1D grid;
  std::vector<double> chi;
  std::vector<double> chi_dot;  // empty means time-independent

  void validate() const;

  /// Sample a closed form; rejects callbacks that are not L-periodic.
  static GaugeFunction from_callback(const Grid1D& grid, const std::function<double(double)>& f);
};

/// Two charged species sharing one prescribed gauge field.
struct CoupledState {
  dirac::WeylSpinorField1D species_a;
  dirac::WeylSpinorField1D species_b;
  double charge_a = 1.0;
  double charge_b = -1.0;
  GaugeField1D gauge;

  void validate() const;
};

/// Phi_s -> exp(i e_s chi) Phi_s, Ax -> Ax + dchi/dx (spectral), and
/// A0 -> A0 - dchi/dt when a time derivative is supplied.
CoupledState gauge_transform(CoupledState state, const GaugeFunction& chi);

/// Single-species transform, sharing the amplitude rule above.
dirac::WeylSpinorField1D gauge_transform(dirac::WeylSpinorField1D field, double charge,
                                         const GaugeFunction& chi);

/// (A0, Ax) = (-dchi/dt, dchi/dx) via spectral differentiation.
GaugeField1D pure_gauge_field(const GaugeFunction& chi);

/// Advance both species under the shared prescribed potential. With a zero
/// field this reduces bitwise to two independent free evolutions.
CoupledState evolve_coupled(CoupledState state, const dirac::DiracParams& params_a,
                            const dirac::DiracParams& params_b, double dt, long n_steps);

struct SectorProbabilities {
  std::vector<double> p_plus;   // |phi+|^2 densities
  std::vector<double> p_minus;  // |phi-|^2 densities
  double total = 0.0;           // grid sum, (sum p+ + p-) dx
};

SectorProbabilities sector_probabilities(const dirac::WeylSpinorField1D& field);

}  // namespace persistq::gauge
