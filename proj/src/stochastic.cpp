#include "persistq/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "persistq/errors.hpp"
#include "persistq/rng.hpp"

namespace persistq::stochastic {

void KacParams::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("KacParams: c must be positive and finite");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw ValidationError("KacParams: lambda must be >= 0 and finite");
}

namespace {

int worker_count(std::size_t n_paths) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("PERSISTQ_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && static_cast<unsigned>(cap) < hw) hw = static_cast<unsigned>(cap);
  }
  const std::size_t per_thread_min = 4096;
  const std::size_t useful = std::max<std::size_t>(1, n_paths / per_thread_min);
  return static_cast<int>(std::min<std::size_t>(hw, useful));
}

/// One exact Kac path; the substream makes the result independent of how
/// paths are distributed over threads.
PathState sample_one_path(const KacParams& params, int s0, double x0, double t_final,
                          std::uint64_t seed, std::uint64_t index, std::uint32_t& switches) {
  Rng rng = substream(seed, index);
  double t = 0.0;
  double x = x0;
  int s = s0;
  switches = 0;
  if (params.lambda > 0.0) {
    for (;;) {
      const double wait = rng.exponential(params.lambda);
      if (t + wait >= t_final) break;
      t += wait;
      x += s * params.c * wait;
      s = -s;
      ++switches;
    }
  }
  x += s * params.c * (t_final - t);
  // Clamp eps-level rounding so |x - x0| <= c*t holds exactly.
  const double reach = params.c * t_final;
  if (x - x0 > reach) x = x0 + reach;
  if (x - x0 < -reach) x = x0 - reach;
  return PathState{x, s};
}

}  // namespace

PathEnsemble sample_kac_paths(const KacParams& params, int init_direction, double init_x,
                              double t_final, std::size_t n_paths, std::uint64_t seed) {
  params.validate();
  if (t_final < 0.0 || !std::isfinite(t_final))
    throw ValidationError("sample_kac_paths: t_final must be >= 0");
  if (n_paths < 1) throw ValidationError("sample_kac_paths: n_paths must be >= 1");
  if (init_direction != 1 && init_direction != -1 && init_direction != 0)
    throw ValidationError("sample_kac_paths: init_direction must be +1, -1, or 0 (alternating)");

  PathEnsemble out;
  out.n_paths = n_paths;
  out.t_final = t_final;
  out.init_x = init_x;
  out.seed = seed;
  out.states.resize(n_paths);
  out.switch_counts.resize(n_paths);

  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const int s0 = init_direction != 0 ? init_direction : (i % 2 == 0 ? +1 : -1);
      out.states[i] =
          sample_one_path(params, s0, init_x, t_final, seed, i, out.switch_counts[i]);
    }
  };

  const int workers = worker_count(n_paths);
  if (workers <= 1) {
    run_range(0, n_paths);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n_paths + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::size_t begin = static_cast<std::size_t>(w) * chunk;
      const std::size_t end = std::min(n_paths, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(run_range, begin, end);
    }
    for (auto& t : pool) t.join();
  }
  return out;
}

Moments kac_moments(const KacParams& params, int init_direction, double t, double init_x) {
  params.validate();
  if (init_direction != 1 && init_direction != -1)
    throw ValidationError("kac_moments: init_direction must be +1 or -1");
  if (t < 0.0) throw ValidationError("kac_moments: t must be >= 0");
  const double s0 = init_direction;
  if (params.lambda == 0.0) return {init_x + params.c * s0 * t, s0};
  const double decay = std::exp(-2.0 * params.lambda * t);
  return {init_x + params.c * s0 / (2.0 * params.lambda) * (1.0 - decay), s0 * decay};
}

double SectorProb1D::total_mass() const {
  double m = 0.0;
  for (std::size_t j = 0; j < p_plus.size(); ++j) m += p_plus[j] + p_minus[j];
  return m * grid.dx;
}

SectorProb1D SectorProb1D::delta(const Grid1D& grid, int cell, int direction) {
  if (cell < 0 || cell >= grid.n) throw ValidationError("SectorProb1D::delta: cell out of range");
  SectorProb1D f{grid, std::vector<double>(grid.n, 0.0), std::vector<double>(grid.n, 0.0)};
  (direction >= 0 ? f.p_plus : f.p_minus)[cell] = 1.0 / grid.dx;
  return f;
}

SectorProb1D evolve_master(SectorProb1D field, const KacParams& params, double dt, long n_steps) {
  params.validate();
  if (field.grid.boundary != Boundary::periodic)
    throw ValidationError("evolve_master: periodic grid required");
  if (field.p_plus.size() != static_cast<std::size_t>(field.grid.n) ||
      field.p_minus.size() != static_cast<std::size_t>(field.grid.n))
    throw ValidationError("evolve_master: field size does not match grid");
  if (n_steps < 0) throw ValidationError("evolve_master: n_steps must be >= 0");
  const double dt_cfl = field.grid.dx / params.c;
  if (!(std::abs(dt - dt_cfl) <= 1e-12 * dt_cfl))
    throw ValidationError("evolve_master: dt must equal dx/c (unit-CFL lattice)");
  for (double v : field.p_plus)
    if (v < 0.0) throw ValidationError("evolve_master: negative p_plus entry");
  for (double v : field.p_minus)
    if (v < 0.0) throw ValidationError("evolve_master: negative p_minus entry");

  // exp(dt*lambda*(sigma1-1)) = [[1-b, b], [b, 1-b]], b = (1 - e^{-2 lambda dt})/2.
  const double b = 0.5 * (1.0 - std::exp(-2.0 * params.lambda * dt));
  auto& pp = field.p_plus;
  auto& pm = field.p_minus;
  for (long step = 0; step < n_steps; ++step) {
    std::rotate(pp.rbegin(), pp.rbegin() + 1, pp.rend());  // right-movers shift +1 cell
    std::rotate(pm.begin(), pm.begin() + 1, pm.end());     // left-movers shift -1 cell
    if (b != 0.0) {
      for (std::size_t j = 0; j < pp.size(); ++j) {
        const double q = b * (pp[j] - pm[j]);  // transfer form conserves pp+pm per site
        pp[j] -= q;
        pm[j] += q;
      }
    }
  }
  return field;
}

namespace {

std::vector<double> periodic_laplacian(const std::vector<double>& f, double dx) {
  const std::size_t n = f.size();
  std::vector<double> lap(n);
  const double inv2 = 1.0 / (dx * dx);
  for (std::size_t j = 0; j < n; ++j) {
    const double left = f[(j + n - 1) % n];
    const double right = f[(j + 1) % n];
    lap[j] = (left - 2.0 * f[j] + right) * inv2;
  }
  return lap;
}

}  // namespace

TelegrapherState evolve_telegrapher(TelegrapherState state, const KacParams& params,
                                    const Grid1D& grid, double dt, long n_steps) {
  params.validate();
  if (grid.boundary != Boundary::periodic)
    throw ValidationError("evolve_telegrapher: periodic grid required");
  const std::size_t n = static_cast<std::size_t>(grid.n);
  if (state.p.size() != n || state.p_dot.size() != n)
    throw ValidationError("evolve_telegrapher: state size does not match grid");
  if (!(dt > 0.0)) throw ValidationError("evolve_telegrapher: dt must be positive");
  if (params.c * dt > grid.dx * (1.0 + 1e-12))
    throw ValidationError("evolve_telegrapher: unstable step, need c*dt <= dx");
  if (n_steps < 0) throw ValidationError("evolve_telegrapher: n_steps must be >= 0");
  if (n_steps == 0) return state;

  const double lam = params.lambda;
  const double c2dt2 = params.c * params.c * dt * dt;

  // Second-order Taylor back-step builds the previous level from (p, p_dot).
  std::vector<double> prev(n), cur = state.p, next(n);
  {
    auto lap = periodic_laplacian(cur, grid.dx);
    for (std::size_t j = 0; j < n; ++j) {
      const double acc = params.c * params.c * lap[j] - 2.0 * lam * state.p_dot[j];
      prev[j] = cur[j] - dt * state.p_dot[j] + 0.5 * dt * dt * acc;
    }
  }

  const double denom = 1.0 + lam * dt;
  const double wprev = 1.0 - lam * dt;
  for (long step = 0; step < n_steps; ++step) {
    auto lap = periodic_laplacian(cur, grid.dx);
    for (std::size_t j = 0; j < n; ++j)
      next[j] = (2.0 * cur[j] - wprev * prev[j] + c2dt2 * lap[j]) / denom;
    std::swap(prev, cur);
    std::swap(cur, next);
  }

  // Centered velocity at the final level via one virtual step.
  {
    auto lap = periodic_laplacian(cur, grid.dx);
    for (std::size_t j = 0; j < n; ++j) {
      const double virtual_next = (2.0 * cur[j] - wprev * prev[j] + c2dt2 * lap[j]) / denom;
      state.p_dot[j] = (virtual_next - prev[j]) / (2.0 * dt);
    }
  }
  state.p = std::move(cur);
  for (double v : state.p)
    if (!std::isfinite(v)) throw NumericalError("evolve_telegrapher: non-finite value");
  return state;
}

std::vector<double> telegrapher_pdot_from_sectors(const SectorProb1D& field, double c) {
  const std::size_t n = field.p_plus.size();
  std::vector<double> pdot(n);
  const double half_inv = 0.5 / field.grid.dx;
  for (std::size_t j = 0; j < n; ++j) {
    const double jr = c * (field.p_plus[(j + 1) % n] - field.p_minus[(j + 1) % n]);
    const double jl = c * (field.p_plus[(j + n - 1) % n] - field.p_minus[(j + n - 1) % n]);
    pdot[j] = -(jr - jl) * half_inv;
  }
  return pdot;
}

double ks_distance_gaussian(std::vector<double> samples, double mean, double sigma) {
  if (samples.empty()) throw ValidationError("ks_distance_gaussian: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  if (sigma == 0.0) {
    // Degenerate target: point mass at `mean`.
    double below = 0.0, above = 0.0;
    for (double x : samples) {
      if (x < mean) below += 1.0;
      if (x > mean) above += 1.0;
    }
    return std::max(below, above) / n;
  }
  double ks = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-(samples[i] - mean) / (sigma * std::sqrt(2.0)));
    ks = std::max(ks, std::abs((i + 1) / n - cdf));
    ks = std::max(ks, std::abs(cdf - i / n));
  }
  return ks;
}

double diffusion_limit_check(double nu, double lambda, double t, std::size_t n_paths,
                             std::uint64_t seed) {
  if (!(nu > 0.0)) throw ValidationError("diffusion_limit_check: nu must be positive");
  if (!(lambda > 0.0)) throw ValidationError("diffusion_limit_check: lambda must be positive");
  if (t < 0.0) throw ValidationError("diffusion_limit_check: t must be >= 0");
  KacParams params{std::sqrt(2.0 * lambda * nu), lambda, "diffusion"};
  auto ensemble = sample_kac_paths(params, 0, 0.0, t, n_paths, seed);
  std::vector<double> xs(ensemble.n_paths);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = ensemble.states[i].x;
  return ks_distance_gaussian(std::move(xs), 0.0, std::sqrt(2.0 * nu * t));
}

SectorProb1D histogram_paths(const PathEnsemble& ensemble, const Grid1D& grid) {
  if (grid.boundary != Boundary::periodic)
    throw ValidationError("histogram_paths: periodic grid required");
  SectorProb1D f{grid, std::vector<double>(grid.n, 0.0), std::vector<double>(grid.n, 0.0)};
  const double weight = 1.0 / (static_cast<double>(ensemble.n_paths) * grid.dx);
  for (std::size_t i = 0; i < ensemble.n_paths; ++i) {
    const auto& st = ensemble.states[i];
    long cell = std::lround((st.x - grid.origin) / grid.dx);
    long m = cell % grid.n;
    if (m < 0) m += grid.n;
    (st.direction >= 0 ? f.p_plus : f.p_minus)[static_cast<std::size_t>(m)] += weight;
  }
  return f;
}

std::vector<double> coarsen_masses(const SectorProb1D& field, int factor) {
  if (factor < 1 || field.grid.n % factor != 0)
    throw ValidationError("coarsen_masses: factor must divide the grid size");
  const int blocks = field.grid.n / factor;
  std::vector<double> out(blocks, 0.0);
  for (int j = 0; j < field.grid.n; ++j)
    out[j / factor] += (field.p_plus[j] + field.p_minus[j]) * field.grid.dx;
  return out;
}

double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ValidationError("l1_distance: size mismatch");
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d += std::abs(a[j] - b[j]);
  return d;
}

}  // namespace persistq::stochastic
