#pragma once

#include <span>
#include <vector>

#include "latcomp/potential.hpp"
#include "latcomp/spectral.hpp"

namespace latcomp::shift {

enum class ShiftMode {
  Simplified,  // equal-depth case: the state-sensitive term is raised to U0
  Realistic,   // U1 = U0 / depth_ratio as given by the parameters
};

struct GridSpec {
  int periods = 4;            // box length in lattice periods (power-of-two point count)
  int points_per_period = 256;
  int eigen_table_size = 65;  // well-shape/energy table resolution over [0, pi]
};

/// One polarization half-cycle theta: 0 -> pi per segment, theta = beta t
/// with beta = pi/tau. Additional segments continue the rotation (the mobile
/// branch of the cycle), so the carried well keeps translating by a/2 per
/// segment.
struct ShiftExperiment {
  optics::LatticeParams params;
  double tau_s = 1e-3;
  ShiftMode mode = ShiftMode::Realistic;
  GridSpec grid;
  int segments = 1;
  int mf_sign = +1;
  double dt_scale = 1.0;  // multiplies the default step hbar/U0
  int record_stride = 8;
};

struct AnalyticHeating {
  double transfer_j = 0.0;   // E = m (dz/tau)^2
  double max_at_pi_j = 0.0;  // 2E
};

/// Equal-depth closed forms for a linear ramp moving the well by dz = a/2.
AnalyticHeating analytic_heating(double tau_s, const optics::LatticeParams& params);
double analytic_fidelity(double tau_s, const optics::LatticeParams& params);

struct ShiftResult {
  double max_heating_j = 0.0;    // sup_t <E(t)> - E_gs(theta(t))
  double final_heating_j = 0.0;  // same difference at the end of the run
  double fidelity_final = 0.0;   // vs the translated well's ground state
  double fidelity_transport_min = 1.0;  // min_t overlap with the comoving ground state
  double norm_drift = 0.0;
  double max_step_norm_drift = 0.0;
  double high_momentum_tail = 0.0;  // aliasing guard, top decile of |p|
  int steps = 0;
  int max_chebychev_order = 0;
  std::vector<spectral::TrajectoryPoint> trajectory;
};

ShiftResult simulate_shift(const ShiftExperiment& experiment);

/// Ramp-averaged well frequency: the accumulated vibrational phase of a
/// linear ramp is tau times this value.
double mean_angular_frequency(const optics::LatticeParams& params, ShiftMode mode);

/// Exact lowest level splitting (rad/s) of the well at fixed theta, from
/// dense diagonalization of one lattice period.
double level_splitting(const optics::LatticeParams& params, ShiftMode mode,
                       double theta = 0.0, int points = 256);

/// Nearest duration whose accumulated vibrational phase is (j + fraction)
/// full cycles, j >= 1. fraction 0 cancels the stop-phase heating, 0.5
/// maximizes it.
double snapped_timing(double tau_target_s, double omega_bar, double fraction = 0.0);
double optimal_timing(double tau_target_s, const optics::LatticeParams& params,
                      ShiftMode mode, bool worst = false, double omega_override = 0.0);

enum class SweepVariable { Tau, Depth, Ratio };

struct SweepRow {
  double value = 0.0;  // SI units: seconds (Tau), joules (Depth), dimensionless (Ratio)
  ShiftResult result;
};

/// One simulate_shift per value; points are independent and are merged by
/// value order regardless of worker count.
std::vector<SweepRow> sweep(const ShiftExperiment& base, SweepVariable variable,
                            std::span<const double> values, int workers = 1);

}  // namespace latcomp::shift
