#pragma once

#include <array>
#include <complex>
#include <functional>
#include <stdexcept>

namespace latcomp::flip {

class ZeroDetuning : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class IntegrationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Three levels coupled 0<->1 and 1<->2 by two far-detuned fields. Couplings
/// are matrix elements in joules; detunings are angular frequencies.
struct LambdaSystem {
  std::array<double, 3> level_rad = {0.0, 0.0, 0.0};  // informational
  std::complex<double> w01_j;
  std::complex<double> w12_j;
  double delta01_rad = 0.0;
  double delta12_rad = 0.0;

  /// Largest |W|/(hbar |Delta|): the reduction below is valid when this is
  /// small.
  double reduction_ratio() const;
};

/// Second-order reduction onto the {0, 2} pair:
///   W02 = (W01 W12 / 2) (1/Delta12 - 1/Delta01) / hbar
/// plus the two light shifts |W|^2 / (hbar Delta).
struct EffectiveTwoLevel {
  std::complex<double> coupling_j;
  double stark01_j = 0.0;
  double stark12_j = 0.0;
  double detuning_rad = 0.0;  // shift-corrected two-level detuning

  double rabi_rad() const;    // 2 |coupling| / hbar
};

EffectiveTwoLevel effective_hamiltonian(const LambdaSystem& system);

enum class PulseShape { Square, Blackman };

/// Final excited-state population after a shaped pulse of the given area
/// (time-integrated Rabi angle) at constant detuning, from |0>.
double simulate_pulse(PulseShape shape, double area_rad, double detuning_rad,
                      double duration_s, double tolerance = 1e-8);

/// Final transfer probability for a linear detuning sweep of `span_rad`
/// crossing resonance at constant coupling.
double simulate_chirped_passage(double coupling_rad, double chirp_rate_rad_s2,
                                double span_rad, double tolerance = 1e-8);

/// Closed-form crossing asymptote used as the oracle regime for the sweep.
double landau_zener_transfer(double coupling_rad, double chirp_rate_rad_s2);

/// Populations after integrating the full three-level system with constant
/// couplings for `duration_s`, starting from |0>. Frame: diag(-Delta01, 0,
/// Delta12) with the two couplings on the off-diagonals.
std::array<double, 3> simulate_lambda(const LambdaSystem& system, double duration_s,
                                      double tolerance = 1e-8);

/// Effective-model counterpart of simulate_lambda for the {0,2} pair.
double simulate_effective(const LambdaSystem& system, double duration_s,
                          double tolerance = 1e-8);

struct AddressingBeam {
  double power_w = 2e-6;
  double wavelength_m = 877e-9;
  double waist_m = 1.2e-6;
  bool magic_wavelength = true;  // storage-state light shift cancelled

  double rayleigh_range_m() const;
};

/// On-axis intensity (and, in the linear regime, Stark shift) ratio between
/// the target site and its nearest neighbor along the beam:
/// 1 + (spacing / z_R)^2.
double addressing_selectivity(const AddressingBeam& beam, double lattice_spacing_m);

/// Off-target excitation ceiling for a pi pulse of the given duration when
/// the neighbor is detuned by `shift_difference_hz`.
double frequency_selectivity(double pulse_duration_s, double shift_difference_hz);

}  // namespace latcomp::flip
