#include "persistq/maxwell.hpp"

#include <cmath>

#include "persistq/errors.hpp"

namespace persistq::maxwell {

namespace {

void validate_components(const Grid3D& grid, const Vec3Field& f, const char* who) {
  for (const auto& comp : f)
    if (comp.size() != grid.size()) throw ValidationError(std::string(who) + ": size mismatch");
}

struct ModeTable {
  std::vector<double> kx, ky, kz;
  explicit ModeTable(const Grid3D& g)
      : kx(fft_wavenumbers(g.n[0], g.d[0])),
        ky(fft_wavenumbers(g.n[1], g.d[1])),
        kz(fft_wavenumbers(g.n[2], g.d[2])) {}
};

/// Remove the longitudinal part k (k.F)/|k|^2 of a spectral field in place;
/// returns the squared norm removed. The k = 0 mode is untouched.
double project_solenoidal(const Grid3D& g, Vec3Field& f) {
  const ModeTable kt(g);
  double removed = 0.0;
  std::size_t idx = 0;
  for (int i = 0; i < g.n[0]; ++i)
    for (int j = 0; j < g.n[1]; ++j)
      for (int l = 0; l < g.n[2]; ++l, ++idx) {
        const double k2 = kt.kx[i] * kt.kx[i] + kt.ky[j] * kt.ky[j] + kt.kz[l] * kt.kz[l];
        if (k2 == 0.0) continue;
        const cplx kdotf = kt.kx[i] * f[0][idx] + kt.ky[j] * f[1][idx] + kt.kz[l] * f[2][idx];
        const cplx s = kdotf / k2;
        f[0][idx] -= kt.kx[i] * s;
        f[1][idx] -= kt.ky[j] * s;
        f[2][idx] -= kt.kz[l] * s;
        removed += std::norm(kdotf) / k2;
      }
  return removed;
}

void forward_all(const Fft3D& fft, Vec3Field& f) {
  for (auto& comp : f) fft.forward(comp);
}
void inverse_all(const Fft3D& fft, Vec3Field& f) {
  for (auto& comp : f) fft.inverse(comp);
}

double spectral_norm2(const Vec3Field& f) {
  double s = 0.0;
  for (const auto& comp : f)
    for (const auto& z : comp) s += std::norm(z);
  return s;
}

/// Per-mode helicity eigenbasis of s.k-hat: two transverse circular vectors
/// e+- = (t1 +- i t2)/sqrt(2) with eigenvalues +-1, plus the longitudinal
/// direction u = k-hat. In this frame each transport step is a pure unit
/// phase per coefficient, so long runs accumulate almost no rounding and the
/// longitudinal part is exactly invariant.
struct ModeBasis {
  std::vector<double> ux, uy, uz, t1x, t1y, t1z, t2x, t2y, t2z;
  std::vector<cplx> phase;  // e^{-i c |k| dt}
  std::vector<std::uint8_t> zero;

  ModeBasis(const Grid3D& g, const ModeTable& kt, double dt) {
    const std::size_t m = g.size();
    ux.resize(m);
    uy.resize(m);
    uz.resize(m);
    t1x.resize(m);
    t1y.resize(m);
    t1z.resize(m);
    t2x.resize(m);
    t2y.resize(m);
    t2z.resize(m);
    phase.resize(m);
    zero.resize(m);
    std::size_t idx = 0;
    for (int i = 0; i < g.n[0]; ++i)
      for (int j = 0; j < g.n[1]; ++j)
        for (int l = 0; l < g.n[2]; ++l, ++idx) {
          const double kxv = kt.kx[i], kyv = kt.ky[j], kzv = kt.kz[l];
          const double kmag = std::sqrt(kxv * kxv + kyv * kyv + kzv * kzv);
          if (kmag == 0.0) {
            zero[idx] = 1;
            phase[idx] = 1.0;
            continue;
          }
          zero[idx] = 0;
          const double iu = 1.0 / kmag;
          const double a = kxv * iu, b = kyv * iu, c = kzv * iu;
          ux[idx] = a;
          uy[idx] = b;
          uz[idx] = c;
          // t1 = normalize(u x axis), axis chosen least parallel to u
          double e1 = 0.0, e2 = 0.0, e3 = 0.0;
          if (std::abs(a) <= std::abs(b) && std::abs(a) <= std::abs(c))
            e1 = 1.0;
          else if (std::abs(b) <= std::abs(c))
            e2 = 1.0;
          else
            e3 = 1.0;
          double v1 = b * e3 - c * e2, v2 = c * e1 - a * e3, v3 = a * e2 - b * e1;
          const double vn = 1.0 / std::sqrt(v1 * v1 + v2 * v2 + v3 * v3);
          v1 *= vn;
          v2 *= vn;
          v3 *= vn;
          t1x[idx] = v1;
          t1y[idx] = v2;
          t1z[idx] = v3;
          t2x[idx] = b * v3 - c * v2;
          t2y[idx] = c * v1 - a * v3;
          t2z[idx] = a * v2 - b * v1;
          const double theta = kmag * dt;  // natural units, c = 1
          cplx z(std::cos(theta), -std::sin(theta));
          phase[idx] = z / std::abs(z);
          }
  }

  /// Cartesian spectral components -> (a+, a-, a0) stored in place.
  void decompose(Vec3Field& f) const {
    for (std::size_t idx = 0; idx < zero.size(); ++idx) {
      if (zero[idx]) continue;
      const cplx fx = f[0][idx], fy = f[1][idx], fz = f[2][idx];
      const cplx d1 = t1x[idx] * fx + t1y[idx] * fy + t1z[idx] * fz;
      const cplx d2 = t2x[idx] * fx + t2y[idx] * fy + t2z[idx] * fz;
      const double r = 1.0 / std::sqrt(2.0);
      f[0][idx] = (d1 - cplx(0.0, 1.0) * d2) * r;  // helicity +1 coefficient
      f[1][idx] = (d1 + cplx(0.0, 1.0) * d2) * r;  // helicity -1 coefficient
      f[2][idx] = ux[idx] * fx + uy[idx] * fy + uz[idx] * fz;  // longitudinal
    }
  }

  void reconstruct(Vec3Field& f) const {
    const double r = 1.0 / std::sqrt(2.0);
    for (std::size_t idx = 0; idx < zero.size(); ++idx) {
      if (zero[idx]) continue;
      const cplx ap = f[0][idx], am = f[1][idx], a0 = f[2][idx];
      const cplx c1 = (ap + am) * r;
      const cplx c2 = cplx(0.0, 1.0) * (ap - am) * r;
      f[0][idx] = c1 * t1x[idx] + c2 * t2x[idx] + a0 * ux[idx];
      f[1][idx] = c1 * t1y[idx] + c2 * t2y[idx] + a0 * uy[idx];
      f[2][idx] = c1 * t1z[idx] + c2 * t2z[idx] + a0 * uz[idx];
    }
  }
};

/// One exact transport step on eigen-coefficients: the F+ block advances its
/// +1 coefficient by e^{-i c|k| dt} and its -1 coefficient by the conjugate;
/// the F- block counter-rotates. k = 0 and longitudinal parts are untouched.
void transport_step(const ModeBasis& basis, Vec3Field& fp, Vec3Field& fm) {
  for (std::size_t idx = 0; idx < basis.zero.size(); ++idx) {
    if (basis.zero[idx]) continue;
    const cplx z = basis.phase[idx];
    const cplx zc = std::conj(z);
    fp[0][idx] *= z;
    fp[1][idx] *= zc;
    fm[0][idx] *= zc;
    fm[1][idx] *= z;
  }
}

double divergence_max(const Grid3D& g, const ModeTable& kt, const Vec3Field& fp,
                      const Vec3Field& fm, double inv_n) {
  double worst = 0.0;
  std::size_t idx = 0;
  for (int i = 0; i < g.n[0]; ++i)
    for (int j = 0; j < g.n[1]; ++j)
      for (int l = 0; l < g.n[2]; ++l, ++idx) {
        const cplx dp = kt.kx[i] * fp[0][idx] + kt.ky[j] * fp[1][idx] + kt.kz[l] * fp[2][idx];
        const cplx dm = kt.kx[i] * fm[0][idx] + kt.ky[j] * fm[1][idx] + kt.kz[l] * fm[2][idx];
        worst = std::max(worst, std::max(std::abs(dp), std::abs(dm)));
      }
  return worst * inv_n;
}

/// Shared evolution loop, entirely in spectral space. Always the same code
/// path so that lambda_gamma = 0 is bit-identical to pure Maxwell.
RSField3D evolve_impl(RSField3D field, double lambda_gamma, double dt, long n_steps,
                      const StepObserver& observer, const char* who) {
  field.validate();
  if (!(dt > 0.0)) throw ValidationError(std::string(who) + ": dt must be positive");
  if (n_steps < 0) throw ValidationError(std::string(who) + ": n_steps must be >= 0");
  if (!(lambda_gamma >= 0.0) || !std::isfinite(lambda_gamma))
    throw ValidationError(std::string(who) + ": lambda_gamma must be >= 0 and finite");
  if (n_steps == 0) return field;

  const Grid3D g = field.grid;
  const ModeTable kt(g);
  const ModeBasis basis(g, kt, dt);
  Fft3D fft(g);
  forward_all(fft, field.f_plus);
  forward_all(fft, field.f_minus);
  basis.decompose(field.f_plus);
  basis.decompose(field.f_minus);

  // Half-step switching weights; b = 0 exactly when lambda_gamma = 0. The
  // switching mixes F+ and F- componentwise, which reads the same in any
  // fixed per-mode basis shared by the two helicity fields.
  const double b = 0.5 * (1.0 - std::exp(-2.0 * lambda_gamma * (0.5 * dt)));
  const double n_total = static_cast<double>(g.size());
  const double parseval = g.cell_volume() / n_total;

  auto mix_half = [&]() {
    if (b == 0.0) return;
    for (int comp = 0; comp < 3; ++comp) {
      auto& p = field.f_plus[comp];
      auto& m = field.f_minus[comp];
      for (std::size_t idx = 0; idx < p.size(); ++idx) {
        const cplx q = b * (p[idx] - m[idx]);
        p[idx] -= q;
        m[idx] += q;
      }
    }
  };

  for (long step = 0; step < n_steps; ++step) {
    mix_half();
    transport_step(basis, field.f_plus, field.f_minus);
    mix_half();

    const double np = spectral_norm2(field.f_plus);
    const double nm = spectral_norm2(field.f_minus);
    if (!std::isfinite(np) || !std::isfinite(nm))
      throw NumericalError(std::string(who) + ": non-finite field at step " + std::to_string(step));
    if (observer) {
      const double e = 0.5 * (np + nm) * parseval;
      const double h = (np - nm) * parseval;
      double div = 0.0;
      std::size_t idx = 0;
      for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
          for (int l = 0; l < g.n[2]; ++l, ++idx) {
            if (basis.zero[idx]) continue;
            const double kmag = std::sqrt(kt.kx[i] * kt.kx[i] + kt.ky[j] * kt.ky[j] +
                                          kt.kz[l] * kt.kz[l]);
            div = std::max(div, kmag * std::max(std::abs(field.f_plus[2][idx]),
                                                std::abs(field.f_minus[2][idx])));
          }
      observer(step, e, h, div / n_total);
    }
  }

  basis.reconstruct(field.f_plus);
  basis.reconstruct(field.f_minus);
  inverse_all(fft, field.f_plus);
  inverse_all(fft, field.f_minus);
  return field;
}

}  // namespace

void RSField3D::validate() const {
  validate_components(grid, f_plus, "RSField3D");
  validate_components(grid, f_minus, "RSField3D");
}

RSField3D make_rs_field(const Grid3D& grid, Vec3Field f_plus, Vec3Field f_minus) {
  validate_components(grid, f_plus, "make_rs_field");
  validate_components(grid, f_minus, "make_rs_field");
  RSField3D out{grid, std::move(f_plus), std::move(f_minus), 0.0};
  Fft3D fft(grid);
  forward_all(fft, out.f_plus);
  forward_all(fft, out.f_minus);
  const double total = spectral_norm2(out.f_plus) + spectral_norm2(out.f_minus);
  const double removed =
      project_solenoidal(grid, out.f_plus) + project_solenoidal(grid, out.f_minus);
  out.projection_residual = total > 0.0 ? std::sqrt(removed / total) : 0.0;
  inverse_all(fft, out.f_plus);
  inverse_all(fft, out.f_minus);
  return out;
}

RSField3D rs_from_eb(const Grid3D& grid, const RealVec3Field& e_field,
                     const RealVec3Field& b_field) {
  for (int c = 0; c < 3; ++c)
    if (e_field[c].size() != grid.size() || b_field[c].size() != grid.size())
      throw ValidationError("rs_from_eb: field size does not match grid");
  Vec3Field fp, fm;
  for (int c = 0; c < 3; ++c) {
    fp[c].resize(grid.size());
    fm[c].resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      fp[c][j] = cplx(e_field[c][j], b_field[c][j]);
      fm[c][j] = cplx(e_field[c][j], -b_field[c][j]);
    }
  }
  return make_rs_field(grid, std::move(fp), std::move(fm));
}

EBFields eb_from_rs(const RSField3D& field) {
  field.validate();
  EBFields out;
  double imag = 0.0;
  for (int c = 0; c < 3; ++c) {
    out.e[c].resize(field.grid.size());
    out.b[c].resize(field.grid.size());
    for (std::size_t j = 0; j < field.grid.size(); ++j) {
      const cplx e = 0.5 * (field.f_plus[c][j] + field.f_minus[c][j]);
      const cplx b = (field.f_plus[c][j] - field.f_minus[c][j]) / cplx(0.0, 2.0);
      out.e[c][j] = e.real();
      out.b[c][j] = b.real();
      imag = std::max(imag, std::max(std::abs(e.imag()), std::abs(b.imag())));
    }
  }
  out.imag_residual = imag;
  return out;
}

RSField3D evolve_maxwell_rs(RSField3D field, double dt, long n_steps,
                            const StepObserver& observer) {
  return evolve_impl(std::move(field), 0.0, dt, n_steps, observer, "evolve_maxwell_rs");
}

RSField3D evolve_photon_kac(RSField3D field, double lambda_gamma, double dt, long n_steps,
                            const StepObserver& observer) {
  return evolve_impl(std::move(field), lambda_gamma, dt, n_steps, observer, "evolve_photon_kac");
}

namespace {

/// Compensated accumulation: grid quadratures over ~1e6 cells must not let
/// summation rounding mask 1e-12-level conservation checks.
class KahanSum {
 public:
  void add(double v) {
    const double y = v - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

double helicity(const RSField3D& field) {
  field.validate();
  KahanSum s;
  for (int c = 0; c < 3; ++c)
    for (std::size_t j = 0; j < field.grid.size(); ++j)
      s.add(std::norm(field.f_plus[c][j]) - std::norm(field.f_minus[c][j]));
  return s.value() * field.grid.cell_volume();
}

double energy(const RSField3D& field) {
  field.validate();
  KahanSum s;
  for (int c = 0; c < 3; ++c)
    for (std::size_t j = 0; j < field.grid.size(); ++j)
      s.add(std::norm(field.f_plus[c][j]) + std::norm(field.f_minus[c][j]));
  return 0.5 * s.value() * field.grid.cell_volume();
}

double divergence_residual(const RSField3D& field) {
  field.validate();
  RSField3D tmp = field;
  Fft3D fft(field.grid);
  forward_all(fft, tmp.f_plus);
  forward_all(fft, tmp.f_minus);
  const ModeTable kt(field.grid);
  return divergence_max(field.grid, kt, tmp.f_plus, tmp.f_minus,
                        1.0 / static_cast<double>(field.grid.size()));
}

}  // namespace persistq::maxwell
