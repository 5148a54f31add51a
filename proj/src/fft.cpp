#include "persistq/fft.hpp"

#include <fftw3.h>

#include "persistq/errors.hpp"

namespace persistq {

namespace {
fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }
}  // namespace

Fft1D::Fft1D(int n) : n_(n) {
  if (n < 2) throw ValidationError("Fft1D: n must be >= 2");
  std::vector<cplx> scratch(static_cast<std::size_t>(n));
  // FFTW_UNALIGNED lets the plan execute on any caller buffer.
  fwd_ = fftw_plan_dft_1d(n, as_fftw(scratch.data()), as_fftw(scratch.data()), FFTW_FORWARD,
                          FFTW_ESTIMATE | FFTW_UNALIGNED);
  bwd_ = fftw_plan_dft_1d(n, as_fftw(scratch.data()), as_fftw(scratch.data()), FFTW_BACKWARD,
                          FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Fft1D::~Fft1D() {
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

void Fft1D::forward(std::span<cplx> data) const {
  if (data.size() != static_cast<std::size_t>(n_)) throw ValidationError("Fft1D::forward: size mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(fwd_), as_fftw(data.data()), as_fftw(data.data()));
}

void Fft1D::inverse(std::span<cplx> data) const {
  if (data.size() != static_cast<std::size_t>(n_)) throw ValidationError("Fft1D::inverse: size mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(bwd_), as_fftw(data.data()), as_fftw(data.data()));
  const double scale = 1.0 / n_;
  for (auto& z : data) z *= scale;
}

Fft3D::Fft3D(const Grid3D& grid) : size_(grid.size()) {
  if (size_ == 0) throw ValidationError("Fft3D: empty grid");
  std::vector<cplx> scratch(size_);
  fwd_ = fftw_plan_dft_3d(grid.n[0], grid.n[1], grid.n[2], as_fftw(scratch.data()),
                          as_fftw(scratch.data()), FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  bwd_ = fftw_plan_dft_3d(grid.n[0], grid.n[1], grid.n[2], as_fftw(scratch.data()),
                          as_fftw(scratch.data()), FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Fft3D::~Fft3D() {
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

void Fft3D::forward(std::span<cplx> data) const {
  if (data.size() != size_) throw ValidationError("Fft3D::forward: size mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(fwd_), as_fftw(data.data()), as_fftw(data.data()));
}

void Fft3D::inverse(std::span<cplx> data) const {
  if (data.size() != size_) throw ValidationError("Fft3D::inverse: size mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(bwd_), as_fftw(data.data()), as_fftw(data.data()));
  const double scale = 1.0 / static_cast<double>(size_);
  for (auto& z : data) z *= scale;
}

namespace {

void require_periodic(const Grid1D& grid, const char* who) {
  if (grid.boundary != Boundary::periodic)
    throw ValidationError(std::string(who) + ": periodic grid required");
}

std::vector<cplx> to_spectrum(std::span<const double> f, const Grid1D& grid) {
  std::vector<cplx> z(f.begin(), f.end());
  Fft1D(grid.n).forward(z);
  return z;
}

std::vector<double> real_part(std::vector<cplx> z, const Grid1D& grid) {
  Fft1D(grid.n).inverse(z);
  std::vector<double> out(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) out[j] = z[j].real();
  return out;
}

}  // namespace

std::vector<double> spectral_derivative(std::span<const double> f, const Grid1D& grid) {
  require_periodic(grid, "spectral_derivative");
  auto z = to_spectrum(f, grid);
  const auto k = fft_wavenumbers(grid.n, grid.dx);
  for (int j = 0; j < grid.n; ++j) z[j] *= cplx(0.0, k[j]);
  if (grid.n % 2 == 0) z[grid.n / 2] = 0.0;  // Nyquist has no signed derivative
  return real_part(std::move(z), grid);
}

std::vector<cplx> spectral_derivative(std::span<const cplx> f, const Grid1D& grid) {
  require_periodic(grid, "spectral_derivative");
  std::vector<cplx> z(f.begin(), f.end());
  Fft1D fft(grid.n);
  fft.forward(z);
  const auto k = fft_wavenumbers(grid.n, grid.dx);
  for (int j = 0; j < grid.n; ++j) z[j] *= cplx(0.0, k[j]);
  if (grid.n % 2 == 0) z[grid.n / 2] = 0.0;
  fft.inverse(z);
  return z;
}

std::vector<double> spectral_antiderivative(std::span<const double> f, const Grid1D& grid) {
  require_periodic(grid, "spectral_antiderivative");
  auto z = to_spectrum(f, grid);
  const auto k = fft_wavenumbers(grid.n, grid.dx);
  z[0] = 0.0;
  for (int j = 1; j < grid.n; ++j) z[j] /= cplx(0.0, k[j]);
  if (grid.n % 2 == 0) z[grid.n / 2] = 0.0;
  return real_part(std::move(z), grid);
}

std::vector<double> spectral_second_derivative(std::span<const double> f, const Grid1D& grid) {
  require_periodic(grid, "spectral_second_derivative");
  auto z = to_spectrum(f, grid);
  const auto k = fft_wavenumbers(grid.n, grid.dx);
  for (int j = 0; j < grid.n; ++j) z[j] *= -k[j] * k[j];
  return real_part(std::move(z), grid);
}

}  // namespace persistq
