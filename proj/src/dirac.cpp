#include "persistq/dirac.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "persistq/errors.hpp"
#include "persistq/gauge.hpp"

namespace persistq::dirac {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr cplx kImag{0.0, 1.0};
}  // namespace

void DiracParams::validate() const {
  if (!(mass >= 0.0) || !std::isfinite(mass))
    throw ValidationError("DiracParams: mass must be >= 0 and finite");
  if (!(c > 0.0)) throw ValidationError("DiracParams: c must be positive");
  if (!(hbar > 0.0)) throw ValidationError("DiracParams: hbar must be positive");
}

DiracParams continue_to_quantum(const stochastic::KacParams& kac, SignConvention convention) {
  kac.validate();
  DiracParams out;
  out.mass = kac.lambda / (kac.c * kac.c);  // hbar = 1 by construction here
  out.c = kac.c;
  out.hbar = 1.0;
  out.convention = convention;
  return out;
}

stochastic::KacParams invert_continuation(const DiracParams& params) {
  params.validate();
  return stochastic::KacParams{params.c, params.mass * params.c * params.c / params.hbar, "a"};
}

double WeylSpinorField1D::norm() const {
  double s = 0.0;
  for (std::size_t j = 0; j < plus.size(); ++j) s += std::norm(plus[j]) + std::norm(minus[j]);
  return s * grid.dx;
}

void WeylSpinorField1D::validate() const {
  if (grid.boundary != Boundary::periodic)
    throw ValidationError("WeylSpinorField1D: periodic grid required");
  if (plus.size() != static_cast<std::size_t>(grid.n) ||
      minus.size() != static_cast<std::size_t>(grid.n))
    throw ValidationError("WeylSpinorField1D: component size does not match grid");
}

namespace {

/// Precomputed unitary factors of one Strang step.
struct StepFactors {
  std::vector<cplx> vd, vo;          // sitewise half-step: diag and sigma1 parts
  std::vector<cplx> link;            // exp(i e integral of the zero-mean A_x)
  bool has_link = false;
  std::vector<cplx> kin_p, kin_m;    // per-mode transport phases
};

StepFactors make_factors(const Grid1D& grid, const DiracParams& params, const double* a0,
                         const double* ax, double charge, double dt) {
  const int n = grid.n;
  StepFactors f;
  f.vd.resize(n);
  f.vo.resize(n);

  const double theta = params.mass * params.c * params.c * dt / (2.0 * params.hbar);
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  const cplx off_unit = -kImag * params.mass_sign() * st;
  for (int j = 0; j < n; ++j) {
    const double pot = a0 ? charge * a0[j] * dt * 0.5 : 0.0;
    const cplx phase = std::exp(cplx(0.0, -pot));
    f.vd[j] = phase * ct;
    f.vo[j] = phase * off_unit;
  }

  double mean_ax = 0.0;
  if (ax) {
    std::vector<double> axv(ax, ax + n);
    mean_ax = std::accumulate(axv.begin(), axv.end(), 0.0) / n;
    double dev = 0.0;
    for (auto& v : axv) {
      v -= mean_ax;
      dev = std::max(dev, std::abs(v));
    }
    if (dev > 0.0) {
      // Exact covariant kinetic factor: conjugate the mean-field transport by
      // the link phase of the zero-mean part of A_x.
      const auto theta_link = spectral_antiderivative(axv, grid);
      f.link.resize(n);
      for (int j = 0; j < n; ++j) f.link[j] = std::exp(cplx(0.0, charge * theta_link[j]));
      f.has_link = true;
    }
  }

  const auto k = fft_wavenumbers(n, grid.dx);
  f.kin_p.resize(n);
  f.kin_m.resize(n);
  for (int j = 0; j < n; ++j) {
    const double w = params.c * (k[j] - charge * mean_ax) * dt;
    f.kin_p[j] = std::exp(cplx(0.0, -w));
    f.kin_m[j] = std::exp(cplx(0.0, +w));
  }
  return f;
}

void apply_half(const StepFactors& f, std::vector<cplx>& plus, std::vector<cplx>& minus) {
  for (std::size_t j = 0; j < plus.size(); ++j) {
    const cplx p = plus[j];
    const cplx m = minus[j];
    plus[j] = f.vd[j] * p + f.vo[j] * m;
    minus[j] = f.vo[j] * p + f.vd[j] * m;
  }
}

void apply_step(const StepFactors& f, const Fft1D& fft, std::vector<cplx>& plus,
                std::vector<cplx>& minus) {
  apply_half(f, plus, minus);
  if (f.has_link) {
    for (std::size_t j = 0; j < plus.size(); ++j) {
      const cplx g = std::conj(f.link[j]);
      plus[j] *= g;
      minus[j] *= g;
    }
  }
  fft.forward(plus);
  fft.forward(minus);
  for (std::size_t j = 0; j < plus.size(); ++j) {
    plus[j] *= f.kin_p[j];
    minus[j] *= f.kin_m[j];
  }
  fft.inverse(plus);
  fft.inverse(minus);
  if (f.has_link) {
    for (std::size_t j = 0; j < plus.size(); ++j) {
      plus[j] *= f.link[j];
      minus[j] *= f.link[j];
    }
  }
  apply_half(f, plus, minus);
}

void check_finite(const WeylSpinorField1D& field, long step, const char* who) {
  double s = 0.0;
  for (std::size_t j = 0; j < field.plus.size(); ++j)
    s += std::norm(field.plus[j]) + std::norm(field.minus[j]);
  if (!std::isfinite(s))
    throw NumericalError(std::string(who) + ": non-finite state at step " + std::to_string(step));
}

void validate_step(const DiracParams& params, double dt, long n_steps, const char* who) {
  params.validate();
  if (!(dt > 0.0)) throw ValidationError(std::string(who) + ": dt must be positive");
  if (n_steps < 0) throw ValidationError(std::string(who) + ": n_steps must be >= 0");
}

}  // namespace

WeylSpinorField1D evolve_dirac_1d(WeylSpinorField1D field, const DiracParams& params, double dt,
                                  long n_steps) {
  validate_step(params, dt, n_steps, "evolve_dirac_1d");
  field.validate();
  const auto f = make_factors(field.grid, params, nullptr, nullptr, 0.0, dt);
  Fft1D fft(field.grid.n);
  for (long step = 0; step < n_steps; ++step) {
    apply_step(f, fft, field.plus, field.minus);
    check_finite(field, step, "evolve_dirac_1d");
  }
  return field;
}

WeylSpinorField1D evolve_dirac_1d(WeylSpinorField1D field, const DiracParams& params,
                                  const gauge::GaugeField1D& field_a, double charge, double dt,
                                  long n_steps) {
  validate_step(params, dt, n_steps, "evolve_dirac_1d");
  field.validate();
  field_a.validate();
  if (!(field_a.grid == field.grid))
    throw ValidationError("evolve_dirac_1d: gauge field grid does not match the matter grid");
  const auto f =
      make_factors(field.grid, params, field_a.a0.data(), field_a.ax.data(), charge, dt);
  Fft1D fft(field.grid.n);
  for (long step = 0; step < n_steps; ++step) {
    apply_step(f, fft, field.plus, field.minus);
    check_finite(field, step, "evolve_dirac_1d");
  }
  return field;
}

WeylSpinorField1D evolve_dirac_1d(WeylSpinorField1D field, const DiracParams& params,
                                  const std::function<gauge::GaugeField1D(double)>& gauge_at,
                                  double charge, double dt, long n_steps, double t0) {
  validate_step(params, dt, n_steps, "evolve_dirac_1d");
  field.validate();
  if (!gauge_at) throw ValidationError("evolve_dirac_1d: null gauge sampler");
  Fft1D fft(field.grid.n);
  for (long step = 0; step < n_steps; ++step) {
    const gauge::GaugeField1D ga = gauge_at(t0 + (step + 0.5) * dt);  // midpoint sampling
    ga.validate();
    if (!(ga.grid == field.grid))
      throw ValidationError("evolve_dirac_1d: gauge field grid does not match the matter grid");
    const auto f = make_factors(field.grid, params, ga.a0.data(), ga.ax.data(), charge, dt);
    apply_step(f, fft, field.plus, field.minus);
    check_finite(field, step, "evolve_dirac_1d");
  }
  return field;
}

double dirac_dispersion(double k, const DiracParams& params) {
  params.validate();
  const double pk = params.hbar * params.c * k;
  const double mc2 = params.mass * params.c * params.c;
  return std::hypot(pk, mc2);
}

cplx poisson_survival_phase(const DiracParams& params, double t) {
  params.validate();
  // exp(-lambda t) at lambda -> -sgn * i m c^2 / hbar (sgn = mass_sign).
  const double angle = params.mass_sign() * params.mass * params.c * params.c * t / params.hbar;
  return std::exp(cplx(0.0, angle));
}

namespace {

std::vector<cplx> dft(const std::vector<cplx>& z) {
  const std::size_t n = z.size();
  if ((n & (n - 1)) == 0) {
    std::vector<cplx> out = z;
    Fft1D(static_cast<int>(n)).forward(out);
    return out;
  }
  std::vector<cplx> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    cplx acc = 0.0;
    const double w = -2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
    for (std::size_t t = 0; t < n; ++t) acc += z[t] * std::exp(cplx(0.0, w * static_cast<double>(t)));
    out[j] = acc;
  }
  return out;
}

}  // namespace

double measure_mode_frequency(const std::vector<cplx>& series, double sample_dt) {
  const std::size_t n = series.size();
  if (n < 32) throw ValidationError("measure_mode_frequency: series too short");
  if (!(sample_dt > 0.0)) throw ValidationError("measure_mode_frequency: sample_dt must be positive");

  cplx mean = 0.0;
  for (const auto& z : series) mean += z;
  mean /= static_cast<double>(n);

  double scale = 0.0;
  std::vector<cplx> windowed(n);
  const double mu = 0.5 * static_cast<double>(n - 1);
  const double sigma = static_cast<double>(n) / 8.0;
  for (std::size_t t = 0; t < n; ++t) {
    const cplx z = series[t] - mean;
    scale = std::max(scale, std::abs(z));
    const double arg = (static_cast<double>(t) - mu) / sigma;
    windowed[t] = z * std::exp(-0.5 * arg * arg);
  }
  double raw = 0.0;
  for (const auto& z : series) raw = std::max(raw, std::abs(z));
  if (scale <= 1e-13 * (raw + 1e-300)) return 0.0;  // constant series

  const auto spectrum = dft(windowed);
  std::size_t peak = 0;
  double best = -1.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double a = std::abs(spectrum[j]);
    if (a > best) {
      best = a;
      peak = j;
    }
  }

  auto logmag = [&](std::size_t j) {
    const double a = std::abs(spectrum[j % n]);
    return a > 1e-300 ? std::log(a) : -700.0;
  };
  const double l0 = logmag(peak);
  const double lm = logmag(peak + n - 1);
  const double lp = logmag(peak + 1);
  double delta = 0.0;
  const double denom = lm - 2.0 * l0 + lp;
  if (denom < 0.0) delta = 0.5 * (lm - lp) / denom;
  delta = std::clamp(delta, -0.5, 0.5);

  double bin = static_cast<double>(peak) + delta;
  if (bin > static_cast<double>(n) / 2.0) bin -= static_cast<double>(n);
  const double omega = std::abs(2.0 * kPi * bin / (static_cast<double>(n) * sample_dt));

  const double span = static_cast<double>(n) * sample_dt;
  if (omega * span < 4.0 * 2.0 * kPi)
    throw ValidationError("measure_mode_frequency: series spans fewer than four periods");
  return omega;
}

double measure_mode_frequency(const std::vector<double>& series, double sample_dt) {
  std::vector<cplx> z(series.size());
  for (std::size_t t = 0; t < series.size(); ++t) z[t] = series[t];
  return measure_mode_frequency(z, sample_dt);
}

double DiracSpinorField3D::norm() const {
  double s = 0.0;
  for (std::size_t j = 0; j < l0.size(); ++j)
    s += std::norm(l0[j]) + std::norm(l1[j]) + std::norm(r0[j]) + std::norm(r1[j]);
  return s * grid.cell_volume();
}

void DiracSpinorField3D::validate() const {
  const std::size_t m = grid.size();
  if (l0.size() != m || l1.size() != m || r0.size() != m || r1.size() != m)
    throw ValidationError("DiracSpinorField3D: component size does not match grid");
}

DiracSpinorField3D evolve_dirac_3d(DiracSpinorField3D field, const DiracParams& params, double dt,
                                   long n_steps) {
  validate_step(params, dt, n_steps, "evolve_dirac_3d");
  field.validate();
  if (n_steps == 0) return field;

  const auto& g = field.grid;
  Fft3D fft(g);
  fft.forward(field.l0);
  fft.forward(field.l1);
  fft.forward(field.r0);
  fft.forward(field.r1);

  const auto kx = fft_wavenumbers(g.n[0], g.d[0]);
  const auto ky = fft_wavenumbers(g.n[1], g.d[1]);
  const auto kz = fft_wavenumbers(g.n[2], g.d[2]);
  const double hc = params.hbar * params.c;
  const double mc2 = params.mass_sign() * params.mass * params.c * params.c;

  // Per-mode rotation coefficients cos(E dt/hbar) and sin(E dt/hbar)/E.
  const std::size_t m = g.size();
  std::vector<double> ca(m), sa(m);
  {
    std::size_t idx = 0;
    for (int i = 0; i < g.n[0]; ++i)
      for (int j = 0; j < g.n[1]; ++j)
        for (int l = 0; l < g.n[2]; ++l, ++idx) {
          const double e =
              std::hypot(hc * std::sqrt(kx[i] * kx[i] + ky[j] * ky[j] + kz[l] * kz[l]), mc2);
          const double phi = e * dt / params.hbar;
          ca[idx] = std::cos(phi);
          sa[idx] = e > 0.0 ? std::sin(phi) / e : 0.0;
        }
  }

  for (long step = 0; step < n_steps; ++step) {
    double checksum = 0.0;
    std::size_t idx = 0;
    for (int i = 0; i < g.n[0]; ++i) {
      for (int j = 0; j < g.n[1]; ++j) {
        const double kxv = kx[i];
        const double kyv = ky[j];
        for (int l = 0; l < g.n[2]; ++l, ++idx) {
          const double kzv = kz[l];
          const cplx a0 = field.l0[idx], a1 = field.l1[idx];
          const cplx b0 = field.r0[idx], b1 = field.r1[idx];
          const cplx kp(kxv, kyv);   // kx + i ky
          const cplx km(kxv, -kyv);  // kx - i ky
          // H = hbar c diag(-sigma.k, sigma.k) + sgn m c^2 offdiag(I)
          const cplx h_l0 = -hc * (kzv * a0 + km * a1) + mc2 * b0;
          const cplx h_l1 = -hc * (kp * a0 - kzv * a1) + mc2 * b1;
          const cplx h_r0 = hc * (kzv * b0 + km * b1) + mc2 * a0;
          const cplx h_r1 = hc * (kp * b0 - kzv * b1) + mc2 * a1;
          const double c1 = ca[idx];
          const cplx c2(0.0, -sa[idx]);  // -i sin(phi)/E
          field.l0[idx] = c1 * a0 + c2 * h_l0;
          field.l1[idx] = c1 * a1 + c2 * h_l1;
          field.r0[idx] = c1 * b0 + c2 * h_r0;
          field.r1[idx] = c1 * b1 + c2 * h_r1;
          checksum += std::norm(field.l0[idx]) + std::norm(field.l1[idx]) +
                      std::norm(field.r0[idx]) + std::norm(field.r1[idx]);
        }
      }
    }
    if (!std::isfinite(checksum))
      throw NumericalError("evolve_dirac_3d: non-finite state at step " + std::to_string(step));
  }

  fft.inverse(field.l0);
  fft.inverse(field.l1);
  fft.inverse(field.r0);
  fft.inverse(field.r1);
  return field;
}

}  // namespace persistq::dirac
