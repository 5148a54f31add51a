#include "persistq/gauge.hpp"

#include <cmath>

#include "persistq/errors.hpp"
#include "persistq/fft.hpp"

namespace persistq::gauge {

void GaugeField1D::validate() const {
  if (grid.boundary != Boundary::periodic)
    throw ValidationError("GaugeField1D: periodic grid required");
  const auto n = static_cast<std::size_t>(grid.n);
  if (a0.size() != n || ax.size() != n)
    throw ValidationError("GaugeField1D: potential size does not match grid");
  for (double v : a0)
    if (!std::isfinite(v)) throw ValidationError("GaugeField1D: non-finite A0 sample");
  for (double v : ax)
    if (!std::isfinite(v)) throw ValidationError("GaugeField1D: non-finite Ax sample");
}

bool GaugeField1D::is_zero() const {
  for (double v : a0)
    if (v != 0.0) return false;
  for (double v : ax)
    if (v != 0.0) return false;
  return true;
}

GaugeField1D GaugeField1D::zero(const Grid1D& grid) {
  return GaugeField1D{grid, std::vector<double>(grid.n, 0.0), std::vector<double>(grid.n, 0.0)};
}

void GaugeFunction::validate() const {
  if (grid.boundary != Boundary::periodic)
    throw ValidationError("GaugeFunction: periodic grid required");
  const auto n = static_cast<std::size_t>(grid.n);
  if (chi.size() != n) throw ValidationError("GaugeFunction: chi size does not match grid");
  if (!chi_dot.empty() && chi_dot.size() != n)
    throw ValidationError("GaugeFunction: chi_dot size does not match grid");
  for (double v : chi)
    if (!std::isfinite(v)) throw ValidationError("GaugeFunction: non-finite chi sample");
}

GaugeFunction GaugeFunction::from_callback(const Grid1D& grid,
                                           const std::function<double(double)>& f) {
  if (!f) throw ValidationError("GaugeFunction::from_callback: null callback");
  if (grid.boundary != Boundary::periodic)
    throw ValidationError("GaugeFunction::from_callback: periodic grid required");
  const double period = grid.length();
  const double wrap = std::abs(f(grid.origin + period) - f(grid.origin));
  const double scale = std::max(1.0, std::abs(f(grid.origin)));
  if (wrap > 1e-10 * scale)
    throw ValidationError("GaugeFunction::from_callback: chi is not periodic on this grid");
  GaugeFunction out{grid, std::vector<double>(grid.n), {}};
  for (int j = 0; j < grid.n; ++j) out.chi[j] = f(grid.x(j));
  return out;
}

void CoupledState::validate() const {
  species_a.validate();
  species_b.validate();
  gauge.validate();
  if (!(species_a.grid == species_b.grid) || !(species_a.grid == gauge.grid))
    throw ValidationError("CoupledState: species and gauge field must share one grid");
  if (!std::isfinite(charge_a) || !std::isfinite(charge_b))
    throw ValidationError("CoupledState: charges must be finite");
}

dirac::WeylSpinorField1D gauge_transform(dirac::WeylSpinorField1D field, double charge,
                                         const GaugeFunction& chi) {
  field.validate();
  chi.validate();
  if (!(chi.grid == field.grid)) throw ValidationError("gauge_transform: grid mismatch");
  for (int j = 0; j < field.grid.n; ++j) {
    const cplx phase = std::exp(cplx(0.0, charge * chi.chi[j]));
    field.plus[j] *= phase;
    field.minus[j] *= phase;
  }
  return field;
}

CoupledState gauge_transform(CoupledState state, const GaugeFunction& chi) {
  state.validate();
  chi.validate();
  if (!(chi.grid == state.gauge.grid)) throw ValidationError("gauge_transform: grid mismatch");
  state.species_a = gauge_transform(std::move(state.species_a), state.charge_a, chi);
  state.species_b = gauge_transform(std::move(state.species_b), state.charge_b, chi);
  const auto dchi = spectral_derivative(std::span<const double>(chi.chi), chi.grid);
  for (int j = 0; j < state.gauge.grid.n; ++j) state.gauge.ax[j] += dchi[j];
  if (!chi.chi_dot.empty())
    for (int j = 0; j < state.gauge.grid.n; ++j) state.gauge.a0[j] -= chi.chi_dot[j];
  return state;
}

GaugeField1D pure_gauge_field(const GaugeFunction& chi) {
  chi.validate();
  GaugeField1D out = GaugeField1D::zero(chi.grid);
  out.ax = spectral_derivative(std::span<const double>(chi.chi), chi.grid);
  if (!chi.chi_dot.empty())
    for (int j = 0; j < chi.grid.n; ++j) out.a0[j] = -chi.chi_dot[j];
  return out;
}

CoupledState evolve_coupled(CoupledState state, const dirac::DiracParams& params_a,
                            const dirac::DiracParams& params_b, double dt, long n_steps) {
  state.validate();
  state.species_a = dirac::evolve_dirac_1d(std::move(state.species_a), params_a, state.gauge,
                                           state.charge_a, dt, n_steps);
  state.species_b = dirac::evolve_dirac_1d(std::move(state.species_b), params_b, state.gauge,
                                           state.charge_b, dt, n_steps);
  return state;
}

SectorProbabilities sector_probabilities(const dirac::WeylSpinorField1D& field) {
  field.validate();
  SectorProbabilities out;
  const auto n = static_cast<std::size_t>(field.grid.n);
  out.p_plus.resize(n);
  out.p_minus.resize(n);
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    out.p_plus[j] = std::norm(field.plus[j]);
    out.p_minus[j] = std::norm(field.minus[j]);
    total += out.p_plus[j] + out.p_minus[j];
  }
  out.total = total * field.grid.dx;
  return out;
}

}  // namespace persistq::gauge
