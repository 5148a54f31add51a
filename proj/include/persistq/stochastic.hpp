#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "persistq/grid.hpp"

namespace persistq::stochastic {

/// Process-defining scalars of the persistent Kac walk: propagation speed c,
/// direction-reversal rate lambda, and a species label for coupled runs.
struct KacParams {
  double c = 1.0;
  double lambda = 0.0;
  std::string species = "a";

  void validate() const;
};

struct PathState {
  double x;
  int direction;  // +1 or -1
};

/// Final (x, s) of each sampled path plus seed provenance.
struct PathEnsemble {
  std::size_t n_paths = 0;
  double t_final = 0.0;
  double init_x = 0.0;
  std::uint64_t seed = 0;
  std::vector<PathState> states;
  std::vector<std::uint32_t> switch_counts;
};

/// Event-driven exact sampling: exponential interarrival times at rate
/// lambda, free flight at speed c in between. Deterministic for a fixed
/// seed and n_paths, independent of the worker-thread count (per-path
/// substreams). init_direction 0 alternates +1/-1 by path index.
PathEnsemble sample_kac_paths(const KacParams& params, int init_direction, double init_x,
                              double t_final, std::size_t n_paths, std::uint64_t seed);

struct Moments {
  double mean_x;
  double mean_s;
};

/// Closed-form first moments of the Kac process:
///   <s>(t) = s0 exp(-2 lambda t)
///   <x>(t) = x0 + (c s0 / 2 lambda)(1 - exp(-2 lambda t)),  ballistic at lambda = 0.
Moments kac_moments(const KacParams& params, int init_direction, double t, double init_x = 0.0);

/// Two sector probability densities on a periodic grid; cell mass is p*dx.
struct SectorProb1D {
  Grid1D grid;
  std::vector<double> p_plus;
  std::vector<double> p_minus;

  double total_mass() const;
  static SectorProb1D delta(const Grid1D& grid, int cell, int direction);
};

/// Exact-lattice master scheme at unit CFL (dt must equal dx/c): transport is
/// a one-cell shift, switching is the exact two-state semigroup
/// exp(dt*lambda*(sigma1 - 1)) applied sitewise in mass-transfer form.
SectorProb1D evolve_master(SectorProb1D field, const KacParams& params, double dt, long n_steps);

struct TelegrapherState {
  std::vector<double> p;
  std::vector<double> p_dot;
};

/// Damped-wave leapfrog for d2P/dt2 + 2 lambda dP/dt = c^2 d2P/dx2 on a
/// periodic grid; second order, explicit, stable for c*dt <= dx.
TelegrapherState evolve_telegrapher(TelegrapherState state, const KacParams& params,
                                    const Grid1D& grid, double dt, long n_steps);

/// Matched telegrapher initial velocity from a sector split: dP/dt = -dJ/dx
/// with J = c (p_plus - p_minus).
std::vector<double> telegrapher_pdot_from_sectors(const SectorProb1D& field, double c);

/// Kolmogorov-Smirnov distance between the symmetrized Kac ensemble at time t
/// (with c = sqrt(2 lambda nu)) and the centered Gaussian of variance 2 nu t.
double diffusion_limit_check(double nu, double lambda, double t, std::size_t n_paths,
                             std::uint64_t seed);

/// KS distance between a sample and the centered Gaussian N(mean, sigma^2);
/// sigma = 0 compares against the point mass at `mean`.
double ks_distance_gaussian(std::vector<double> samples, double mean, double sigma);

/// Bin final path positions to cells by nearest center (periodic wrap);
/// returns per-sector densities comparable to a master-equation solution.
SectorProb1D histogram_paths(const PathEnsemble& ensemble, const Grid1D& grid);

/// Sum cell masses over blocks of `factor` cells; L1 comparisons of a Monte
/// Carlo histogram against a fine master solution are made on these blocks.
std::vector<double> coarsen_masses(const SectorProb1D& field, int factor);

/// L1 distance between two block-mass vectors.
double l1_distance(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace persistq::stochastic
