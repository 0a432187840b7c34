#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace latcomp::optics {

class DegenerateDepth : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AtomSpecies {
  double mass_kg = 0.0;
  int f = 0;          // total angular momentum of the hyperfine level
  int mf = 0;         // magnetic sublevel, |mf| <= f
  double hyperfine_splitting_hz = 0.0;  // informational

  static AtomSpecies cesium();  // 133Cs, F=4, mF=1 storage manifold
  void validate() const;
};

/// State-dependent 1-D lattice potential
///   U(z) = U0/2 cos(theta) cos(2kz) + U1/2 sin(theta) sin(2kz)
/// with k = pi/a. U1 defaults to U0 * mf / (2 f); the depth ratio U0/U1 can
/// be overridden directly.
struct LatticeParams {
  double u0_j = 0.0;        // well depth at theta = 0
  double u1_j = 0.0;        // well depth scale of the state-sensitive term
  double lattice_const_m = 0.0;
  AtomSpecies atom;

  static LatticeParams make(double u0_j, double lattice_const_m, AtomSpecies atom,
                            double depth_ratio_override = 0.0);

  double wavenumber() const;          // k = pi / a
  double depth_ratio() const;         // U0 / U1
  double mass() const { return atom.mass_kg; }
  void validate() const;
};

double potential(double z, double theta, const LatticeParams& params, int mf_sign = +1);

/// e- and e+ standing-wave amplitudes of the interference pattern for a
/// relative polarization angle theta.
std::pair<std::complex<double>, std::complex<double>> field_components(
    double z, double theta, double single_beam_amplitude, const LatticeParams& params);

/// Peak-to-trough depth of the potential at fixed theta: the quadrature sum
/// of the two terms.
double effective_depth(double theta, const LatticeParams& params);

/// Harmonic frequency of the well at angle theta, omega = k sqrt(2 U_eff / m).
/// Throws DegenerateDepth when the well vanishes.
double harmonic_frequency(const LatticeParams& params, double theta = 0.0);

/// Position of the potential minimum tracked continuously from theta = 0.
/// The reference minimum (theta = 0) sits at z = a/2; a full pi rotation
/// displaces it by a/2 for either mf sign.
double minimum_position(double theta, const LatticeParams& params, int mf_sign = +1);

/// Minimum displacement for the equal-depth case, linear in theta.
double minimum_displacement_simplified(double theta, const LatticeParams& params);

/// Instantaneous velocity of the minimum for a linear ramp theta = beta t.
double minimum_velocity(double theta, double beta, const LatticeParams& params,
                        int mf_sign = +1);

/// Parameter file ingestion; units are encoded in the field names
/// ("U0_uK", "a_um", "F", "mF", optional "ratio", "mass_kg").
LatticeParams params_from_json(std::string_view text);
std::string params_to_json(const LatticeParams& params);

}  // namespace latcomp::optics
