#pragma once

#include <array>
#include <functional>
#include <vector>

#include "persistq/fft.hpp"
#include "persistq/grid.hpp"

namespace persistq::maxwell {

using Vec3Field = std::array<std::vector<cplx>, 3>;
using RealVec3Field = std::array<std::vector<double>, 3>;

/// Riemann-Silberstein helicity pair F+- = E +- iB on a periodic grid.
/// Construction projects each helicity field onto its solenoidal part and
/// records the removed fraction; the evolvers preserve k.F exactly per mode.
struct RSField3D {
  Grid3D grid;
  Vec3Field f_plus;
  Vec3Field f_minus;
  double projection_residual = 0.0;

  void validate() const;
};

/// Build an RS field from complex helicity data (projecting), or from real
/// E and B fields via F+- = E +- iB.
RSField3D make_rs_field(const Grid3D& grid, Vec3Field f_plus, Vec3Field f_minus);
RSField3D rs_from_eb(const Grid3D& grid, const RealVec3Field& e_field,
                     const RealVec3Field& b_field);

struct EBFields {
  RealVec3Field e;
  RealVec3Field b;
  double imag_residual = 0.0;  // largest imaginary part discarded
};

/// E = (F+ + F-)/2, B = (F+ - F-)/(2i).
EBFields eb_from_rs(const RSField3D& field);

/// Per-step diagnostics hook: (step index, energy, helicity, divergence).
using StepObserver = std::function<void(long, double, double, double)>;

/// Vacuum Maxwell in helicity form: per mode the exact unitary
/// exp(-i (+-c s.k) dt) within each helicity block.
RSField3D evolve_maxwell_rs(RSField3D field, double dt, long n_steps,
                            const StepObserver& observer = {});

/// Spin-1 persistent process: the same exact transport plus the sitewise
/// switching semigroup exp(dt lambda_gamma (sigma1 - 1)) mixing F+ and F-
/// componentwise (Strang split). lambda_gamma = 0 reduces bitwise to
/// evolve_maxwell_rs.
RSField3D evolve_photon_kac(RSField3D field, double lambda_gamma, double dt, long n_steps,
                            const StepObserver& observer = {});

/// Integral of |F+|^2 - |F-|^2 over the box.
double helicity(const RSField3D& field);

/// Field energy: (1/2) integral of |F+|^2 + |F-|^2, which equals the
/// integral of |E|^2 + |B|^2 for real E, B.
double energy(const RSField3D& field);

/// max over modes of |k . F(k)| across both helicities (DFT normalized by N).
double divergence_residual(const RSField3D& field);

}  // namespace persistq::maxwell
