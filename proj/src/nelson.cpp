#include "persistq/nelson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "persistq/errors.hpp"
#include "persistq/fft.hpp"

namespace persistq::nelson {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = 3.14159265358979323846;

/// Fourth-order first derivative with one-sided closures (or periodic wrap).
std::vector<double> fd4_derivative(std::span<const double> f, double h, bool periodic) {
  const long n = static_cast<long>(f.size());
  std::vector<double> out(f.size());
  const double c = 1.0 / (12.0 * h);
  auto at = [&](long j) { return f[static_cast<std::size_t>(periodic ? (j % n + n) % n : j)]; };
  const long lo = periodic ? 0 : 2;
  const long hi = periodic ? n : n - 2;
  for (long j = lo; j < hi; ++j)
    out[j] = (at(j - 2) - 8.0 * at(j - 1) + 8.0 * at(j + 1) - at(j + 2)) * c;
  if (!periodic && n >= 5) {
    out[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * c;
    out[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * c;
    out[n - 2] =
        (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) * c;
    out[n - 1] =
        (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) *
        c;
  }
  return out;
}

/// Fourth-order second derivative with one-sided closures (or periodic wrap).
std::vector<double> fd4_second_derivative(std::span<const double> f, double h, bool periodic) {
  const long n = static_cast<long>(f.size());
  std::vector<double> out(f.size());
  const double c = 1.0 / (12.0 * h * h);
  auto at = [&](long j) { return f[static_cast<std::size_t>(periodic ? (j % n + n) % n : j)]; };
  const long lo = periodic ? 0 : 2;
  const long hi = periodic ? n : n - 2;
  for (long j = lo; j < hi; ++j)
    out[j] =
        (-at(j - 2) + 16.0 * at(j - 1) - 30.0 * at(j) + 16.0 * at(j + 1) - at(j + 2)) * c;
  if (!periodic && n >= 6) {
    out[0] = (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4] -
              10.0 * f[5]) *
             c;
    out[1] =
        (10.0 * f[0] - 15.0 * f[1] - 4.0 * f[2] + 14.0 * f[3] - 6.0 * f[4] + f[5]) * c;
    out[n - 2] = (10.0 * f[n - 1] - 15.0 * f[n - 2] - 4.0 * f[n - 3] + 14.0 * f[n - 4] -
                  6.0 * f[n - 5] + f[n - 6]) *
                 c;
    out[n - 1] = (45.0 * f[n - 1] - 154.0 * f[n - 2] + 214.0 * f[n - 3] - 156.0 * f[n - 4] +
                  61.0 * f[n - 5] - 10.0 * f[n - 6]) *
                 c;
  }
  return out;
}

bool any_masked(std::span<const std::uint8_t> mask) {
  for (auto m : mask)
    if (m) return true;
  return false;
}

}  // namespace

std::vector<double> derivative(std::span<const double> f, const Grid1D& grid) {
  if (f.size() != static_cast<std::size_t>(grid.n))
    throw ValidationError("derivative: size does not match grid");
  if (grid.boundary == Boundary::periodic) return spectral_derivative(f, grid);
  return fd4_derivative(f, grid.dx, false);
}

std::vector<double> second_derivative(std::span<const double> f, const Grid1D& grid) {
  if (f.size() != static_cast<std::size_t>(grid.n))
    throw ValidationError("second_derivative: size does not match grid");
  if (grid.boundary == Boundary::periodic) return spectral_second_derivative(f, grid);
  return fd4_second_derivative(f, grid.dx, false);
}

std::vector<std::uint8_t> node_mask(std::span<const double> rho, const Grid1D& grid) {
  const long n = static_cast<long>(rho.size());
  if (n != grid.n) throw ValidationError("node_mask: size does not match grid");
  double peak = 0.0;
  for (double v : rho) {
    if (!(v >= 0.0)) throw ValidationError("node_mask: rho must be nonnegative");
    peak = std::max(peak, v);
  }
  const double threshold = 1e-8 * peak;
  const bool periodic = grid.boundary == Boundary::periodic;

  std::vector<std::uint8_t> seed(rho.size(), 0);
  auto at = [&](long j) { return rho[static_cast<std::size_t>((j % n + n) % n)]; };
  for (long j = 0; j < n; ++j) {
    if (rho[j] < threshold) {
      seed[j] = 1;
      continue;
    }
    // A local minimum whose floor is consistent with a zero crossing between
    // samples is a node even when no sample dips below threshold. Ties are
    // allowed on one side: a node exactly halfway between samples produces an
    // equal-valued pair of minima.
    if (!periodic && (j == 0 || j == n - 1)) continue;
    const double left = at(j - 1), right = at(j + 1);
    const bool local_min =
        (rho[j] < left && rho[j] <= right) || (rho[j] <= left && rho[j] < right);
    if (local_min) {
      const double curv = left - 2.0 * rho[j] + right;
      if (rho[j] <= 0.25 * curv) seed[j] = 1;
    }
  }

  std::vector<std::uint8_t> mask(rho.size(), 0);
  for (long j = 0; j < n; ++j) {
    if (!seed[j]) continue;
    for (long d = -2; d <= 2; ++d) {
      const long t = j + d;
      if (periodic)
        mask[static_cast<std::size_t>((t % n + n) % n)] = 1;
      else if (t >= 0 && t < n)
        mask[static_cast<std::size_t>(t)] = 1;
    }
  }
  return mask;
}

PolarParts polar_decompose(std::span<const cplx> psi, const Grid1D& grid, double hbar) {
  const long n = static_cast<long>(psi.size());
  if (n != grid.n) throw ValidationError("polar_decompose: size does not match grid");
  PolarParts out;
  out.rho.resize(psi.size());
  double peak = 0.0;
  for (long j = 0; j < n; ++j) {
    out.rho[j] = std::norm(psi[j]);
    peak = std::max(peak, out.rho[j]);
  }
  if (peak == 0.0) throw ValidationError("polar_decompose: psi is identically zero");
  out.mask = node_mask(out.rho, grid);

  out.r_log.resize(psi.size());
  for (long j = 0; j < n; ++j) out.r_log[j] = out.mask[j] ? kNan : 0.5 * std::log(out.rho[j]);

  out.s_phase.resize(psi.size());
  auto wrap = [](double a) {
    while (a > kPi) a -= 2.0 * kPi;
    while (a <= -kPi) a += 2.0 * kPi;
    return a;
  };
  double s = std::arg(psi[0]);
  out.s_phase[0] = hbar * s;
  double total = 0.0;
  for (long j = 1; j < n; ++j) {
    const double d = wrap(std::arg(psi[j]) - std::arg(psi[j - 1]));
    s += d;
    total += d;
    out.s_phase[j] = hbar * s;
  }
  if (grid.boundary == Boundary::periodic) {
    total += wrap(std::arg(psi[0]) - std::arg(psi[n - 1]));
    out.winding = static_cast<int>(std::lround(total / (2.0 * kPi)));
  }
  return out;
}

std::vector<double> osmotic_velocity(std::span<const double> rho, double mass, double hbar,
                                     const Grid1D& grid, std::span<const std::uint8_t> mask) {
  if (!(mass > 0.0) || !(hbar > 0.0))
    throw ValidationError("osmotic_velocity: mass and hbar must be positive");
  if (rho.size() != static_cast<std::size_t>(grid.n))
    throw ValidationError("osmotic_velocity: size does not match grid");
  std::vector<double> logrho(rho.size());
  for (std::size_t j = 0; j < rho.size(); ++j) logrho[j] = std::log(rho[j]);
  // Local stencils once nodes are present, so the singular region cannot
  // pollute the whole line through a global transform.
  const bool masked = !mask.empty() && any_masked(mask);
  std::vector<double> u;
  if (grid.boundary == Boundary::periodic && !masked)
    u = spectral_derivative(std::span<const double>(logrho), grid);
  else
    u = fd4_derivative(logrho, grid.dx, grid.boundary == Boundary::periodic);
  const double nu = 0.5 * hbar / mass;
  for (std::size_t j = 0; j < u.size(); ++j)
    u[j] = (!mask.empty() && mask[j]) ? kNan : nu * u[j];
  return u;
}

std::vector<double> osmotic_velocity(std::span<const double> rho, double mass, double hbar,
                                     const Grid1D& grid) {
  const auto mask = node_mask(rho, grid);
  return osmotic_velocity(rho, mass, hbar, grid, mask);
}

std::vector<double> current_velocity(std::span<const double> s_phase, double mass,
                                     const Grid1D& grid) {
  if (!(mass > 0.0)) throw ValidationError("current_velocity: mass must be positive");
  if (s_phase.size() != static_cast<std::size_t>(grid.n))
    throw ValidationError("current_velocity: size does not match grid");
  if (grid.boundary != Boundary::periodic) {
    auto v = fd4_derivative(s_phase, grid.dx, false);
    for (auto& x : v) x /= mass;
    return v;
  }
  // An unwrapped phase on a ring grows linearly with the winding number.
  // Split off the endpoint slope so the spectral derivative only sees the
  // periodic remainder; exact for plane waves and pure winding flows.
  const long n = grid.n;
  const double slope = (s_phase[n - 1] - s_phase[0]) / ((n - 1) * grid.dx);
  std::vector<double> rem(s_phase.size());
  for (long j = 0; j < n; ++j) rem[j] = s_phase[j] - slope * (grid.x(j) - grid.origin);
  auto v = spectral_derivative(std::span<const double>(rem), grid);
  for (auto& x : v) x = (x + slope) / mass;
  return v;
}

VelocityFields velocity_fields(std::span<const double> rho, std::span<const double> s_phase,
                               double mass, double hbar, const Grid1D& grid) {
  VelocityFields out;
  out.u = osmotic_velocity(rho, mass, hbar, grid);
  out.v = current_velocity(s_phase, mass, grid);
  out.nu = 0.5 * hbar / mass;
  return out;
}

std::vector<double> quantum_potential(std::span<const double> rho, double mass, double hbar,
                                      const Grid1D& grid) {
  if (!(mass > 0.0) || !(hbar > 0.0))
    throw ValidationError("quantum_potential: mass and hbar must be positive");
  if (rho.size() != static_cast<std::size_t>(grid.n))
    throw ValidationError("quantum_potential: size does not match grid");
  const auto mask = node_mask(rho, grid);
  const bool masked = any_masked(mask);

  std::vector<double> amp(rho.size());
  for (std::size_t j = 0; j < rho.size(); ++j) amp[j] = std::sqrt(rho[j]);

  std::vector<double> lap;
  if (grid.boundary == Boundary::periodic && !masked)
    lap = spectral_second_derivative(std::span<const double>(amp), grid);
  else
    lap = fd4_second_derivative(amp, grid.dx, grid.boundary == Boundary::periodic);
  if (grid.boundary == Boundary::radial) {
    const auto damp = fd4_derivative(amp, grid.dx, false);
    for (int j = 0; j < grid.n; ++j) lap[j] += 2.0 / grid.x(j) * damp[j];
  }

  std::vector<double> q(rho.size());
  const double coef = -0.5 * hbar * hbar / mass;
  for (std::size_t j = 0; j < rho.size(); ++j)
    q[j] = mask[j] ? kNan : coef * lap[j] / amp[j];
  return q;
}

std::vector<double> quantum_potential_from_u(std::span<const double> u, double mass, double hbar,
                                             const Grid1D& grid) {
  if (!(mass > 0.0) || !(hbar > 0.0))
    throw ValidationError("quantum_potential_from_u: mass and hbar must be positive");
  if (u.size() != static_cast<std::size_t>(grid.n))
    throw ValidationError("quantum_potential_from_u: size does not match grid");
  bool has_nan = false;
  for (double v : u)
    if (std::isnan(v)) has_nan = true;
  std::vector<double> div;
  if (grid.boundary == Boundary::periodic && !has_nan)
    div = spectral_derivative(u, grid);
  else
    div = fd4_derivative(u, grid.dx, grid.boundary == Boundary::periodic);
  if (grid.boundary == Boundary::radial)
    for (int j = 0; j < grid.n; ++j) div[j] += 2.0 * u[j] / grid.x(j);

  std::vector<double> q(u.size());
  for (std::size_t j = 0; j < u.size(); ++j)
    q[j] = -0.5 * mass * u[j] * u[j] - 0.5 * hbar * div[j];
  return q;
}

BalanceResidual stationarity_residual(const StationaryState& state) {
  const auto n = static_cast<std::size_t>(state.grid.n);
  if (state.rho.size() != n || state.v_potential.size() != n)
    throw ValidationError("stationarity_residual: field sizes do not match grid");
  const auto q = quantum_potential(state.rho, state.mass, state.hbar, state.grid);
  auto mask = node_mask(state.rho, state.grid);
  if (state.mask.size() == n)
    for (std::size_t j = 0; j < n; ++j) mask[j] |= state.mask[j];

  BalanceResidual out;
  out.field.resize(n);
  std::size_t masked = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (mask[j]) {
      out.field[j] = kNan;
      ++masked;
      continue;
    }
    out.field[j] = state.v_potential[j] + q[j] - state.energy;
    out.max_abs = std::max(out.max_abs, std::abs(out.field[j]));
  }
  out.mask_fraction = static_cast<double>(masked) / static_cast<double>(n);
  return out;
}

GordonCurrents gordon_decompose(const dirac::WeylSpinorField1D& field,
                                const dirac::DiracParams& params) {
  params.validate();
  field.validate();
  if (!(params.mass > 0.0))
    throw ValidationError("gordon_decompose: positive mass required (1/m coefficients)");
  const auto n = static_cast<std::size_t>(field.grid.n);
  const double c = params.c;
  const double hbar = params.hbar;
  const double mc2 = params.mass_sign() * params.mass * c * c;

  const auto dplus = spectral_derivative(std::span<const cplx>(field.plus), field.grid);
  const auto dminus = spectral_derivative(std::span<const cplx>(field.minus), field.grid);

  // On-shell time derivatives from i hbar dpsi/dt = H psi, then
  // d0 = (1/c) d/dt.
  std::vector<cplx> d0p(n), d0m(n);
  for (std::size_t j = 0; j < n; ++j) {
    const cplx hp = -cplx(0.0, 1.0) * hbar * c * dplus[j] + mc2 * field.minus[j];
    const cplx hm = +cplx(0.0, 1.0) * hbar * c * dminus[j] + mc2 * field.plus[j];
    d0p[j] = hp / cplx(0.0, hbar * c);
    d0m[j] = hm / cplx(0.0, hbar * c);
  }

  GordonCurrents out;
  for (int mu = 0; mu < 2; ++mu) {
    out.total[mu].resize(n);
    out.convective[mu].resize(n);
    out.spin[mu].resize(n);
  }

  // Tensor bilinear psi-bar sigma^{01} psi = psi^dag sigma2 psi and its
  // spatial/temporal derivatives (sigma^{10} is its negative).
  std::vector<double> t01(n), d0_t01(n);
  for (std::size_t j = 0; j < n; ++j) {
    const cplx p = field.plus[j];
    const cplx m = field.minus[j];
    t01[j] = 2.0 * std::imag(std::conj(p) * m);
    // d0 (psi^dag sigma2 psi) = 2 Re(psi^dag sigma2 d0 psi)
    const cplx s2d0_p = -cplx(0.0, 1.0) * d0m[j];
    const cplx s2d0_m = +cplx(0.0, 1.0) * d0p[j];
    d0_t01[j] = 2.0 * std::real(std::conj(p) * s2d0_p + std::conj(m) * s2d0_m);
  }
  const auto dx_t01 = spectral_derivative(std::span<const double>(t01), field.grid);

  const double gordon = hbar / (2.0 * params.mass * c);
  for (std::size_t j = 0; j < n; ++j) {
    const cplx p = field.plus[j];
    const cplx m = field.minus[j];
    out.total[0][j] = std::norm(p) + std::norm(m);  // psi-bar gamma^0 psi
    out.total[1][j] = std::norm(p) - std::norm(m);  // psi-bar gamma^1 psi

    // psi-bar d^mu psi with d^0 = d0 and d^1 = -d/dx; psi-bar = psi^dag sigma1.
    const cplx bar_d0 = std::conj(p) * d0m[j] + std::conj(m) * d0p[j];
    const cplx bar_dx = std::conj(p) * dminus[j] + std::conj(m) * dplus[j];
    out.convective[0][j] = -2.0 * gordon * std::imag(bar_d0);
    out.convective[1][j] = +2.0 * gordon * std::imag(bar_dx);

    out.spin[0][j] = gordon * dx_t01[j];   // d1 (psi-bar sigma^{01} psi)
    out.spin[1][j] = -gordon * d0_t01[j];  // d0 (psi-bar sigma^{10} psi)

    for (int mu = 0; mu < 2; ++mu)
      out.max_residual =
          std::max(out.max_residual,
                   std::abs(out.convective[mu][j] + out.spin[mu][j] - out.total[mu][j]));
  }
  return out;
}

}  // namespace persistq::nelson
