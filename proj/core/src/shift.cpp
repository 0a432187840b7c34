#include "latcomp/shift.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <mutex>
#include <thread>

#include "latcomp/units.hpp"

namespace latcomp::shift {

using optics::LatticeParams;
using spectral::SpatialGrid;
using spectral::SpectralWorkspace;
using spectral::Wavefunction;
using units::hbar;
using units::pi;

namespace {

LatticeParams effective_params(const ShiftExperiment& exp) {
  LatticeParams p = exp.params;
  if (exp.mode == ShiftMode::Simplified) p.u1_j = p.u0_j;
  p.validate();
  return p;
}

double fold_angle(double theta, bool* mirrored = nullptr) {
  double t = std::fmod(theta, 2.0 * pi);
  if (t < 0.0) t += 2.0 * pi;
  const bool mirror = t > pi;
  if (mirror) t = 2.0 * pi - t;
  if (mirrored) *mirrored = mirror;
  return t;
}

// Catmull-Rom interpolation on a uniform table over [0, pi].
double interp_table(const std::vector<double>& table, double theta) {
  const int n = static_cast<int>(table.size());
  if (n == 1) return table[0];
  const double u = std::clamp(theta, 0.0, pi) / pi * (n - 1);
  const int i = std::clamp(static_cast<int>(u), 0, n - 2);
  const double f = u - i;
  const double p0 = table[static_cast<std::size_t>(std::max(i - 1, 0))];
  const double p1 = table[static_cast<std::size_t>(i)];
  const double p2 = table[static_cast<std::size_t>(i + 1)];
  const double p3 = table[static_cast<std::size_t>(std::min(i + 2, n - 1))];
  return p1 + 0.5 * f * (p2 - p0 +
                         f * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                              f * (3.0 * (p1 - p2) + p3 - p0)));
}

// One-period well eigensolve with the minimum moved to the window center.
std::vector<std::pair<double, Wavefunction>> well_states(const LatticeParams& params,
                                                         double theta, int mf_sign,
                                                         int points, int n_states) {
  const double a = params.lattice_const_m;
  const SpatialGrid grid = SpatialGrid::make(a, points);
  const double z_min = optics::minimum_position(theta, params, mf_sign);
  std::vector<double> u(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    u[static_cast<std::size_t>(i)] = optics::potential(grid.position(i) + z_min, theta, params, mf_sign);
  return spectral::bound_states(grid, u, params.mass(), n_states);
}

/// Immutable per-parameter-set data shared by all trajectories of a sweep.
struct ShiftContext {
  LatticeParams params;   // effective (mode folded in)
  int mf_sign = 1;
  SpatialGrid grid;
  double z0 = 0.0;        // initial well center on the big grid
  Wavefunction psi0;      // embedded ground state at theta = 0
  std::vector<double> e_gs;                // theta table over [0, pi]
  std::vector<Wavefunction> well_shapes;   // embedded at z0, same table
  double e_min = 0.0, e_max = 0.0;

  double displacement(double theta) const {
    return optics::minimum_position(theta, params, mf_sign) -
           optics::minimum_position(0.0, params, mf_sign);
  }

  double ground_energy(double theta) const { return interp_table(e_gs, fold_angle(theta)); }

  // Comoving well ground state at `theta`, translated to the well carried
  // from z0 and boosted to the minimum's instantaneous velocity.
  Wavefunction reference(SpectralWorkspace& ws, double theta, double velocity) const {
    bool mirror = false;
    const double local = fold_angle(theta, &mirror);
    const int n = static_cast<int>(well_shapes.size());
    const int k = std::clamp(static_cast<int>(std::lround(local / pi * (n - 1))), 0, n - 1);
    const Wavefunction* base = &well_shapes[static_cast<std::size_t>(k)];
    Wavefunction mirrored;
    if (mirror) {
      mirrored = mirror_about(*base, z0);
      base = &mirrored;
    }
    return ws.translated(*base, displacement(theta), velocity);
  }

  Wavefunction mirror_about(const Wavefunction& psi, double center) const {
    const int n = grid.num_points;
    const int ic = static_cast<int>(std::llround((center + 0.5 * grid.length_m) / grid.dx()));
    Wavefunction out{psi.grid, std::vector<std::complex<double>>(static_cast<std::size_t>(n))};
    for (int j = 0; j < n; ++j) {
      const int src = ((2 * ic - j) % n + n) % n;
      out.amp[static_cast<std::size_t>(j)] = psi.amp[static_cast<std::size_t>(src)];
    }
    return out;
  }
};

// Place a one-period state (well at its window center x = 0) onto the big
// grid with the well at `center`. Spacings match by construction; the tails
// wrapped at the window edge are at machine zero for a deep well.
Wavefunction embed_window(const Wavefunction& small, const SpatialGrid& big, double center) {
  const int n = big.num_points;
  const int p = small.grid.num_points;
  Wavefunction out{big, std::vector<std::complex<double>>(static_cast<std::size_t>(n), 0.0)};
  const int i0 = static_cast<int>(std::llround((center + 0.5 * big.length_m) / big.dx()));
  for (int j = 0; j < p; ++j) {
    const int idx = ((i0 + j - p / 2) % n + n) % n;
    out.amp[static_cast<std::size_t>(idx)] = small.amp[static_cast<std::size_t>(j)];
  }
  out.normalize();
  return out;
}

std::shared_ptr<const ShiftContext> make_context(const ShiftExperiment& exp) {
  auto ctx = std::make_shared<ShiftContext>();
  ctx->params = effective_params(exp);
  ctx->mf_sign = exp.mf_sign;
  const double a = ctx->params.lattice_const_m;
  const int ppp = exp.grid.points_per_period;
  ctx->grid = SpatialGrid::make(exp.grid.periods * a, exp.grid.periods * ppp);
  ctx->z0 = -0.5 * a;

  const bool flat = ctx->params.u1_j == ctx->params.u0_j;
  const int table_n = flat ? 1 : std::max(2, exp.grid.eigen_table_size);
  ctx->e_gs.resize(static_cast<std::size_t>(table_n));
  ctx->well_shapes.resize(static_cast<std::size_t>(table_n));
  for (int k = 0; k < table_n; ++k) {
    const double theta = table_n == 1 ? 0.0 : pi * k / (table_n - 1);
    auto states = well_states(ctx->params, theta, ctx->mf_sign, ppp, 1);
    ctx->e_gs[static_cast<std::size_t>(k)] = states[0].first;
    ctx->well_shapes[static_cast<std::size_t>(k)] =
        embed_window(states[0].second, ctx->grid, ctx->z0);
  }
  ctx->psi0 = ctx->well_shapes[0];

  const double p_cut = ctx->grid.momentum_cutoff();
  const double kinetic_top = p_cut * p_cut / (2.0 * ctx->params.mass());
  const double u_top = 0.5 * ctx->params.u0_j;
  const double span = kinetic_top + 2.0 * u_top;
  ctx->e_min = -u_top - 0.05 * span;
  ctx->e_max = u_top + kinetic_top + 0.05 * span;
  return ctx;
}

ShiftResult run_shift(const ShiftContext& ctx, const ShiftExperiment& exp) {
  if (exp.tau_s <= 0.0) throw std::invalid_argument("shift duration must be positive");
  if (exp.segments < 1) throw std::invalid_argument("segments must be >= 1");
  if (exp.grid.points_per_period < 64)
    throw std::invalid_argument("need at least 64 points per lattice period");

  SpectralWorkspace ws(ctx.grid, ctx.params.mass());
  const double beta = pi / exp.tau_s;
  const double total = exp.segments * exp.tau_s;
  spectral::ChebychevConfig cfg{
      .dt_s = exp.dt_scale * hbar / ctx.params.u0_j,
      .e_min_j = ctx.e_min,
      .e_max_j = ctx.e_max,
      .tolerance = 1e-12,
      .max_order = 4096,
  };

  // U(z, theta) = A(theta) cos(2kz) + B(theta) sin(2kz) on fixed spatial
  // harmonics; only the two amplitudes change between steps.
  const int n = ctx.grid.num_points;
  std::vector<double> cos2kz(static_cast<std::size_t>(n)), sin2kz(static_cast<std::size_t>(n));
  const double two_k = 2.0 * ctx.params.wavenumber();
  for (int i = 0; i < n; ++i) {
    cos2kz[static_cast<std::size_t>(i)] = std::cos(two_k * ctx.grid.position(i));
    sin2kz[static_cast<std::size_t>(i)] = std::sin(two_k * ctx.grid.position(i));
  }
  auto sampler = [&](double t, std::span<double> out) {
    const double theta = beta * t;
    const double a = 0.5 * ctx.params.u0_j * std::cos(theta);
    const double b = 0.5 * ctx.mf_sign * ctx.params.u1_j * std::sin(theta);
    for (int i = 0; i < n; ++i)
      out[static_cast<std::size_t>(i)] =
          a * cos2kz[static_cast<std::size_t>(i)] + b * sin2kz[static_cast<std::size_t>(i)];
  };

  ShiftResult result;
  auto hook = [&](double t, const Wavefunction& psi) {
    const double theta = beta * t;
    const bool stopped = t <= 0.0 || t >= total * (1.0 - 1e-12);
    const double v = stopped ? 0.0
                             : optics::minimum_velocity(theta, beta, ctx.params, ctx.mf_sign);
    const Wavefunction ref = ctx.reference(ws, theta, v);
    const double f = std::norm(spectral::overlap(ref, psi));
    if (t > 0.0) result.fidelity_transport_min = std::min(result.fidelity_transport_min, f);
  };

  auto prop = spectral::propagate_time_dependent(ws, ctx.psi0, sampler, total, cfg,
                                                 exp.record_stride, hook);

  for (const auto& point : prop.trajectory) {
    const double de = point.energy_j - ctx.ground_energy(beta * point.t_s);
    result.max_heating_j = std::max(result.max_heating_j, de);
  }
  result.final_heating_j =
      prop.trajectory.back().energy_j - ctx.ground_energy(beta * total);

  const Wavefunction ref_final = ctx.reference(ws, beta * total, 0.0);
  result.fidelity_final = std::norm(spectral::overlap(ref_final, prop.final_state));
  result.norm_drift = prop.final_norm_drift;
  result.max_step_norm_drift = prop.max_step_norm_drift;
  result.high_momentum_tail = ws.high_momentum_population(prop.final_state);
  result.steps = static_cast<int>(std::ceil(total / cfg.dt_s - 1e-12));
  result.max_chebychev_order = prop.max_order_used;
  result.trajectory = std::move(prop.trajectory);
  return result;
}

}  // namespace

AnalyticHeating analytic_heating(double tau_s, const LatticeParams& params) {
  if (tau_s <= 0.0) throw std::invalid_argument("tau must be positive");
  const double dz = 0.5 * params.lattice_const_m;
  const double e = params.mass() * (dz / tau_s) * (dz / tau_s);
  return {e, 2.0 * e};
}

double analytic_fidelity(double tau_s, const LatticeParams& params) {
  if (tau_s <= 0.0) throw std::invalid_argument("tau must be positive");
  LatticeParams p = params;
  p.u1_j = p.u0_j;
  const double omega = optics::harmonic_frequency(p, 0.0);
  const double dz = 0.5 * p.lattice_const_m;
  const double v = dz / tau_s;
  return std::exp(-p.mass() * v * v / (2.0 * omega * hbar));
}

ShiftResult simulate_shift(const ShiftExperiment& experiment) {
  const auto ctx = make_context(experiment);
  return run_shift(*ctx, experiment);
}

double mean_angular_frequency(const LatticeParams& params, ShiftMode mode) {
  ShiftExperiment tmp{.params = params, .mode = mode};
  const LatticeParams p = effective_params(tmp);
  if (p.u1_j == p.u0_j) return optics::harmonic_frequency(p, 0.0);
  // Simpson rule over the ramp
  const int n = 4096;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double theta = pi * i / n;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += w * optics::harmonic_frequency(p, theta);
  }
  return acc * (pi / n) / 3.0 / pi;
}

double level_splitting(const LatticeParams& params, ShiftMode mode, double theta,
                       int points) {
  ShiftExperiment tmp{.params = params, .mode = mode};
  const LatticeParams p = effective_params(tmp);
  auto states = well_states(p, theta, +1, points, 2);
  return (states[1].first - states[0].first) / hbar;
}

double snapped_timing(double tau_target_s, double omega_bar, double fraction) {
  if (tau_target_s <= 0.0 || omega_bar <= 0.0)
    throw std::invalid_argument("snapped_timing domain");
  const double period = 2.0 * pi / omega_bar;
  const auto j = std::max<long long>(1, std::llround(tau_target_s / period - fraction));
  return (static_cast<double>(j) + fraction) * period;
}

double optimal_timing(double tau_target_s, const LatticeParams& params, ShiftMode mode,
                      bool worst, double omega_override) {
  const double omega_bar =
      omega_override > 0.0 ? omega_override : mean_angular_frequency(params, mode);
  return snapped_timing(tau_target_s, omega_bar, worst ? 0.5 : 0.0);
}

std::vector<SweepRow> sweep(const ShiftExperiment& base, SweepVariable variable,
                            std::span<const double> values, int workers) {
  std::vector<SweepRow> rows(values.size());
  if (values.empty()) return rows;
  workers = std::clamp<int>(workers, 1, static_cast<int>(values.size()));

  // A tau sweep shares one context; depth/ratio sweeps rebuild per point.
  std::shared_ptr<const ShiftContext> shared;
  if (variable == SweepVariable::Tau) shared = make_context(base);

  std::atomic<std::size_t> cursor{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto work = [&]() {
    while (true) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= values.size()) return;
      try {
        ShiftExperiment exp = base;
        switch (variable) {
          case SweepVariable::Tau: exp.tau_s = values[i]; break;
          case SweepVariable::Depth: {
            const double ratio = exp.params.depth_ratio();
            exp.params.u0_j = values[i];
            exp.params.u1_j = values[i] / ratio;
            break;
          }
          case SweepVariable::Ratio:
            exp.params.u1_j = exp.params.u0_j / values[i];
            break;
        }
        rows[i].value = values[i];
        if (shared) {
          rows[i].result = run_shift(*shared, exp);
        } else {
          rows[i].result = simulate_shift(exp);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return rows;
}

}  // namespace latcomp::shift
