#pragma once

#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace latcomp::spectral {

class GridMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ConvergenceFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class SpectralBoundViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform periodic grid on [-L/2, L/2). The point count must be a power of
/// two (>= 16); the implied momentum grid is cut off at pi*hbar*N/L.
struct SpatialGrid {
  double length_m = 0.0;
  int num_points = 0;

  static SpatialGrid make(double length_m, int num_points);

  double dx() const { return length_m / num_points; }
  double position(int i) const { return -0.5 * length_m + i * dx(); }
  double momentum_cutoff() const;

  bool operator==(const SpatialGrid&) const = default;
};

struct Wavefunction {
  SpatialGrid grid;
  std::vector<std::complex<double>> amp;

  double norm() const;  // sqrt(dx * sum |amp|^2)
  void normalize();
};

/// dx-weighted inner product <a|b>.
std::complex<double> overlap(const Wavefunction& a, const Wavefunction& b);

struct ChebychevConfig {
  double dt_s = 0.0;
  double e_min_j = 0.0;
  double e_max_j = 0.0;
  double tolerance = 1e-12;  // truncation: last retained coefficient below this
  int max_order = 4096;
};

struct ChebychevStepInfo {
  int order_used = 0;
  double last_coefficient = 0.0;
};

/// FFT engine bound to one grid and mass. Not thread-safe; make one per
/// worker. Plan creation is internally serialized.
class SpectralWorkspace {
 public:
  SpectralWorkspace(SpatialGrid grid, double mass_kg);
  ~SpectralWorkspace();
  SpectralWorkspace(SpectralWorkspace&& other) noexcept;
  SpectralWorkspace& operator=(SpectralWorkspace&&) noexcept;
  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  const SpatialGrid& grid() const { return grid_; }
  double mass() const { return mass_; }

  /// out = (T + U) psi via forward transform, diagonal kinetic factor,
  /// inverse transform, plus the diagonal potential term.
  void apply_hamiltonian(std::span<const std::complex<double>> psi,
                         std::span<const double> potential,
                         std::span<std::complex<double>> out);

  double energy(const Wavefunction& psi, std::span<const double> potential);

  /// One interval of length config.dt_s under the (static) sampled potential.
  void chebychev_step(Wavefunction& psi, std::span<const double> potential,
                      const ChebychevConfig& config, ChebychevStepInfo* info = nullptr);

  /// psi translated by `displacement_m` (spectral phase shift) and optionally
  /// boosted to mean velocity `velocity_m_per_s`.
  Wavefunction translated(const Wavefunction& psi, double displacement_m,
                          double velocity_m_per_s = 0.0);

  /// Population carried by the top (1-fraction) momentum shell; an aliasing
  /// guard for moving-packet runs.
  double high_momentum_population(const Wavefunction& psi, double fraction = 0.9);

 private:
  struct Impl;
  void check(const Wavefunction& psi) const;
  SpatialGrid grid_;
  double mass_ = 0.0;
  Impl* impl_ = nullptr;
};

Wavefunction apply_hamiltonian(const Wavefunction& psi, std::span<const double> potential,
                               double mass_kg);

/// Lowest eigenpairs of the grid Hamiltonian by dense diagonalization,
/// energies ascending, states orthonormal under the dx-weighted product.
std::vector<std::pair<double, Wavefunction>> bound_states(const SpatialGrid& grid,
                                                          std::span<const double> potential,
                                                          double mass_kg, int n_states);

struct TrajectoryPoint {
  double t_s = 0.0;
  double energy_j = 0.0;
  double norm = 0.0;
  double overlap_initial = 0.0;  // |<psi0|psi(t)>|^2
};

struct PropagationResult {
  Wavefunction final_state;
  std::vector<TrajectoryPoint> trajectory;
  double max_step_norm_drift = 0.0;
  double final_norm_drift = 0.0;
  int max_order_used = 0;
};

using PotentialSampler = std::function<void(double t_s, std::span<double> out)>;
using RecordHook = std::function<void(double t_s, const Wavefunction& psi)>;

/// Propagate under a time-dependent potential approximated as piecewise
/// constant, resampled at each interval midpoint. Trajectory rows are written
/// every `record_stride` intervals and at the final time, with the energy
/// taken against the instantaneous Hamiltonian.
PropagationResult propagate_time_dependent(SpectralWorkspace& ws, const Wavefunction& psi0,
                                           const PotentialSampler& sample_potential,
                                           double total_time_s, const ChebychevConfig& config,
                                           int record_stride = 1,
                                           const RecordHook& hook = {});

/// J_0..J_kmax by normalized downward recurrence.
std::vector<double> bessel_jn(int kmax, double x);

// Binary snapshot: "LCWF0001", uint64 N, double L, then N interleaved
// (real, imag) doubles, all little-endian.
void save_wavefunction(const std::string& path, const Wavefunction& psi);
Wavefunction load_wavefunction(const std::string& path);

}  // namespace latcomp::spectral
