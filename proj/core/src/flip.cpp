#include "latcomp/flip.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "latcomp/units.hpp"

namespace latcomp::flip {

using units::hbar;
using units::pi;
using cplx = std::complex<double>;

double LambdaSystem::reduction_ratio() const {
  const double r1 = std::abs(w01_j) / (hbar * std::abs(delta01_rad));
  const double r2 = std::abs(w12_j) / (hbar * std::abs(delta12_rad));
  return std::max(r1, r2);
}

double EffectiveTwoLevel::rabi_rad() const { return 2.0 * std::abs(coupling_j) / hbar; }

EffectiveTwoLevel effective_hamiltonian(const LambdaSystem& system) {
  if (system.delta01_rad == 0.0 || system.delta12_rad == 0.0)
    throw ZeroDetuning("reduction requires nonzero detunings");
  EffectiveTwoLevel eff;
  eff.coupling_j = system.w01_j * system.w12_j / (2.0 * hbar) *
                   (1.0 / system.delta12_rad - 1.0 / system.delta01_rad);
  eff.stark01_j = std::norm(system.w01_j) / (hbar * system.delta01_rad);
  eff.stark12_j = std::norm(system.w12_j) / (hbar * system.delta12_rad);
  eff.detuning_rad = system.delta01_rad + system.delta12_rad + eff.stark01_j / hbar +
                     eff.stark12_j / hbar;
  return eff;
}

namespace {

struct TwoLevelState {
  cplx c0{1.0, 0.0};
  cplx c1{0.0, 0.0};
};

// Exact propagator over h for constant (Omega, Delta):
// H/hbar = [[-D/2, W/2], [W/2, D/2]].
TwoLevelState advance(const TwoLevelState& s, double rabi, double detuning, double h) {
  const double w = std::hypot(rabi, detuning);
  const double phi = 0.5 * w * h;
  if (w == 0.0) return s;
  const double c = std::cos(phi), sn = std::sin(phi);
  const double nx = rabi / w, nz = -detuning / w;
  const cplx u00(c, -sn * nz);
  const cplx u11(c, sn * nz);
  const cplx u01(0.0, -sn * nx);
  return {u00 * s.c0 + u01 * s.c1, u01 * s.c0 + u11 * s.c1};
}

double dist(const TwoLevelState& a, const TwoLevelState& b) {
  return std::sqrt(std::norm(a.c0 - b.c0) + std::norm(a.c1 - b.c1));
}

// Adaptive midpoint-exponential integration; each substep is exactly
// unitary, so only the midpoint sampling of (Omega, Delta) carries error.
TwoLevelState integrate_two_level(const std::function<double(double)>& rabi_of_t,
                                  const std::function<double(double)>& detuning_of_t,
                                  double duration, double tolerance,
                                  TwoLevelState state = {}) {
  double t = 0.0;
  double h = duration / 64.0;
  const double h_min = duration * 1e-13;
  while (t < duration) {
    h = std::min(h, duration - t);
    const auto coarse = advance(state, rabi_of_t(t + 0.5 * h), detuning_of_t(t + 0.5 * h), h);
    auto fine = advance(state, rabi_of_t(t + 0.25 * h), detuning_of_t(t + 0.25 * h), 0.5 * h);
    fine = advance(fine, rabi_of_t(t + 0.75 * h), detuning_of_t(t + 0.75 * h), 0.5 * h);
    const double err = dist(coarse, fine);
    if (err < tolerance) {
      state = fine;
      t += h;
      h *= std::min(5.0, 0.9 * std::cbrt(tolerance / std::max(err, 1e-300)));
    } else {
      h *= std::max(0.2, 0.9 * std::cbrt(tolerance / err));
      if (h < h_min) throw IntegrationFailure("two-level step size underflow");
    }
  }
  return state;
}

}  // namespace

double simulate_pulse(PulseShape shape, double area_rad, double detuning_rad,
                      double duration_s, double tolerance) {
  if (area_rad <= 0.0 || duration_s <= 0.0)
    throw std::invalid_argument("pulse area and duration must be positive");
  std::function<double(double)> rabi;
  switch (shape) {
    case PulseShape::Square: {
      const double amp = area_rad / duration_s;
      rabi = [amp](double) { return amp; };
      break;
    }
    case PulseShape::Blackman: {
      const double amp = area_rad / (0.42 * duration_s);
      rabi = [amp, duration_s](double t) {
        const double u = t / duration_s;
        return amp * (0.42 - 0.5 * std::cos(2.0 * pi * u) + 0.08 * std::cos(4.0 * pi * u));
      };
      break;
    }
  }
  const auto detuning = [detuning_rad](double) { return detuning_rad; };
  const auto fin = integrate_two_level(rabi, detuning, duration_s, tolerance);
  return std::norm(fin.c1);
}

namespace {

// Upper dressed state of H/hbar = [[-D/2, W/2], [W/2, D/2]]; at large
// negative detuning it coincides with bare |0>, at large positive detuning
// with bare |1>.
TwoLevelState upper_dressed(double rabi, double detuning) {
  const double w = std::hypot(rabi, detuning);
  const double c = std::sqrt(0.5 * (1.0 - detuning / w));
  const double s = std::sqrt(0.5 * (1.0 + detuning / w));
  return {cplx(c, 0.0), cplx(s, 0.0)};
}

}  // namespace

double simulate_chirped_passage(double coupling_rad, double chirp_rate_rad_s2,
                                double span_rad, double tolerance) {
  if (chirp_rate_rad_s2 <= 0.0 || span_rad <= 0.0)
    throw std::invalid_argument("chirp rate and span must be positive");
  if (coupling_rad < 0.0) throw std::invalid_argument("coupling must be non-negative");
  const double duration = span_rad / chirp_rate_rad_s2;
  if (coupling_rad == 0.0) return 0.0;
  const auto rabi = [coupling_rad](double) { return coupling_rad; };
  const auto detuning = [=](double t) { return chirp_rate_rad_s2 * (t - 0.5 * duration); };
  // Prepare and measure in the dressed basis: the branch entering as |0>
  // leaves as |1> when the passage is adiabatic.
  const auto state = integrate_two_level(rabi, detuning, duration, tolerance,
                                         upper_dressed(coupling_rad, detuning(0.0)));
  const auto target = upper_dressed(coupling_rad, detuning(duration));
  return std::norm(std::conj(target.c0) * state.c0 + std::conj(target.c1) * state.c1);
}

double landau_zener_transfer(double coupling_rad, double chirp_rate_rad_s2) {
  const double gamma = 0.25 * coupling_rad * coupling_rad / chirp_rate_rad_s2;
  return 1.0 - std::exp(-2.0 * pi * gamma);
}

std::array<double, 3> simulate_lambda(const LambdaSystem& system, double duration_s,
                                      double tolerance) {
  (void)tolerance;  // constant couplings: the single exponential is exact
  Eigen::Matrix3cd h;
  const cplx g1 = system.w01_j / hbar;
  const cplx g2 = system.w12_j / hbar;
  h << cplx(-system.delta01_rad, 0.0), g1, cplx(0.0, 0.0),
       std::conj(g1), cplx(0.0, 0.0), g2,
       cplx(0.0, 0.0), std::conj(g2), cplx(system.delta12_rad, 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> solver(h);
  if (solver.info() != Eigen::Success) throw IntegrationFailure("3x3 eigensolve failed");
  Eigen::Vector3cd psi;
  psi << 1.0, 0.0, 0.0;
  Eigen::Vector3cd modes = solver.eigenvectors().adjoint() * psi;
  for (int k = 0; k < 3; ++k) {
    const double ph = -solver.eigenvalues()(k) * duration_s;
    modes(k) *= cplx(std::cos(ph), std::sin(ph));
  }
  psi = solver.eigenvectors() * modes;
  return {std::norm(psi(0)), std::norm(psi(1)), std::norm(psi(2))};
}

double simulate_effective(const LambdaSystem& system, double duration_s, double tolerance) {
  const auto eff = effective_hamiltonian(system);
  const auto rabi = [&](double) { return eff.rabi_rad(); };
  const auto detuning = [&](double) { return eff.detuning_rad; };
  const auto fin = integrate_two_level(rabi, detuning, duration_s, tolerance);
  return std::norm(fin.c1);
}

double AddressingBeam::rayleigh_range_m() const {
  if (waist_m <= 0.0 || wavelength_m <= 0.0)
    throw std::invalid_argument("beam waist and wavelength must be positive");
  return pi * waist_m * waist_m / wavelength_m;
}

double addressing_selectivity(const AddressingBeam& beam, double lattice_spacing_m) {
  if (lattice_spacing_m <= 0.0) throw std::invalid_argument("spacing must be positive");
  const double q = lattice_spacing_m / beam.rayleigh_range_m();
  return 1.0 + q * q;
}

double frequency_selectivity(double pulse_duration_s, double shift_difference_hz) {
  if (pulse_duration_s <= 0.0 || shift_difference_hz <= 0.0)
    throw std::invalid_argument("frequency_selectivity domain");
  const double rabi = pi / pulse_duration_s;
  const double detuning = 2.0 * pi * shift_difference_hz;
  return rabi * rabi / (rabi * rabi + detuning * detuning);
}

}  // namespace latcomp::flip
