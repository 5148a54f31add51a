#pragma once

#include <complex>
#include <span>
#include <vector>

#include "persistq/grid.hpp"

namespace persistq {

using cplx = std::complex<double>;

/// Complex-to-complex FFT of fixed length, wrapping FFTW with plans created
/// once (FFTW_ESTIMATE, so planning is deterministic run to run). forward()
/// is unnormalized; inverse() divides by n.
class Fft1D {
 public:
  explicit Fft1D(int n);
  ~Fft1D();
  Fft1D(const Fft1D&) = delete;
  Fft1D& operator=(const Fft1D&) = delete;

  int size() const { return n_; }
  void forward(std::span<cplx> data) const;
  void inverse(std::span<cplx> data) const;

 private:
  int n_;
  void* fwd_;
  void* bwd_;
};

/// Same contract for a periodic 3D grid (row-major, z fastest).
class Fft3D {
 public:
  explicit Fft3D(const Grid3D& grid);
  ~Fft3D();
  Fft3D(const Fft3D&) = delete;
  Fft3D& operator=(const Fft3D&) = delete;

  void forward(std::span<cplx> data) const;
  void inverse(std::span<cplx> data) const;

 private:
  std::size_t size_;
  void* fwd_;
  void* bwd_;
};

/// Spectral d/dx on a periodic grid. Real input path takes the real part
/// back; the Nyquist mode's odd derivative is zeroed.
std::vector<double> spectral_derivative(std::span<const double> f, const Grid1D& grid);
std::vector<cplx> spectral_derivative(std::span<const cplx> f, const Grid1D& grid);

/// Spectral antiderivative with zero mean; the k=0 (mean) component of f is
/// dropped, so this inverts spectral_derivative on zero-mean data.
std::vector<double> spectral_antiderivative(std::span<const double> f, const Grid1D& grid);

/// Spectral d2/dx2 on a periodic grid (real data).
std::vector<double> spectral_second_derivative(std::span<const double> f, const Grid1D& grid);

}  // namespace persistq
