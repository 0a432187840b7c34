#pragma once

namespace latcomp::units {

inline constexpr double pi = 3.14159265358979323846;

inline constexpr double k_boltzmann = 1.380649e-23;    // J/K
inline constexpr double hbar = 1.054571817e-34;        // J s

inline constexpr double uK_to_joule(double micro_kelvin) {
  return micro_kelvin * 1e-6 * k_boltzmann;
}
inline constexpr double joule_to_uK(double energy_j) {
  return energy_j / (1e-6 * k_boltzmann);
}
inline constexpr double um_to_m(double micrometers) { return micrometers * 1e-6; }
inline constexpr double m_to_um(double meters) { return meters * 1e6; }
inline constexpr double ms_to_s(double milliseconds) { return milliseconds * 1e-3; }
inline constexpr double s_to_ms(double seconds) { return seconds * 1e3; }
inline constexpr double khz_to_hz(double khz) { return khz * 1e3; }
inline constexpr double hz_to_khz(double hz) { return hz * 1e-3; }
inline constexpr double hz_to_angular(double hz) { return 2.0 * pi * hz; }
inline constexpr double angular_to_hz(double rad_per_s) { return rad_per_s / (2.0 * pi); }

}  // namespace latcomp::units
