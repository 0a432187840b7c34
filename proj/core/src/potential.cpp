#include "latcomp/potential.hpp"

#include <cmath>

#include <json.hpp>

#include "latcomp/lattice.hpp"
#include "latcomp/units.hpp"

namespace latcomp::optics {

using units::pi;

AtomSpecies AtomSpecies::cesium() {
  return {.mass_kg = 2.2069e-25, .f = 4, .mf = 1, .hyperfine_splitting_hz = 9.1926e9};
}

void AtomSpecies::validate() const {
  if (mass_kg <= 0.0) throw std::invalid_argument("atom mass must be positive");
  if (std::abs(mf) > f) throw std::invalid_argument("|mF| must not exceed F");
}

LatticeParams LatticeParams::make(double u0_j, double lattice_const_m, AtomSpecies atom,
                                  double depth_ratio_override) {
  atom.validate();
  LatticeParams params{.u0_j = u0_j, .u1_j = 0.0, .lattice_const_m = lattice_const_m,
                       .atom = atom};
  if (depth_ratio_override != 0.0) {
    if (depth_ratio_override < 0.0) throw std::invalid_argument("depth ratio must be positive");
    params.u1_j = u0_j / depth_ratio_override;
  } else {
    if (atom.mf == 0) throw std::invalid_argument("mF = 0 leaves the mobile term empty");
    params.u1_j = u0_j * static_cast<double>(std::abs(atom.mf)) / (2.0 * atom.f);
  }
  params.validate();
  return params;
}

double LatticeParams::wavenumber() const { return pi / lattice_const_m; }

double LatticeParams::depth_ratio() const { return u0_j / u1_j; }

void LatticeParams::validate() const {
  if (u0_j <= 0.0) throw std::invalid_argument("U0 must be positive");
  if (u1_j < 0.0) throw std::invalid_argument("U1 must be non-negative");
  if (lattice_const_m <= 0.0) throw std::invalid_argument("lattice constant must be positive");
  atom.validate();
}

double potential(double z, double theta, const LatticeParams& params, int mf_sign) {
  const double k = params.wavenumber();
  return 0.5 * params.u0_j * std::cos(theta) * std::cos(2.0 * k * z) +
         0.5 * mf_sign * params.u1_j * std::sin(theta) * std::sin(2.0 * k * z);
}

std::pair<std::complex<double>, std::complex<double>> field_components(
    double z, double theta, double single_beam_amplitude, const LatticeParams& params) {
  const double k = params.wavenumber();
  const std::complex<double> i(0.0, 1.0);
  const double amp = std::sqrt(2.0) * single_beam_amplitude;
  const auto e_minus = amp * std::exp(i * (theta / 2.0)) * std::cos(k * z - theta / 2.0);
  const auto e_plus = -amp * std::exp(-i * (theta / 2.0)) * std::cos(k * z + theta / 2.0);
  return {e_minus, e_plus};
}

double effective_depth(double theta, const LatticeParams& params) {
  return std::hypot(params.u0_j * std::cos(theta), params.u1_j * std::sin(theta));
}

double harmonic_frequency(const LatticeParams& params, double theta) {
  const double depth = effective_depth(theta, params);
  if (depth <= 0.0) throw DegenerateDepth("well depth vanishes at this angle");
  return params.wavenumber() * std::sqrt(2.0 * depth / params.mass());
}

namespace {

// Phase of the combined standing wave, tracked continuously: the two terms
// combine to (A/2) cos(2kz - phi) with tan(phi) = (U1/U0) tan(theta) and
// |phi - theta| < pi/2, so unwrapping against theta is exact.
double carrier_phase(double theta, const LatticeParams& params, int mf_sign) {
  const double principal = std::atan2(mf_sign * params.u1_j * std::sin(theta),
                                      params.u0_j * std::cos(theta));
  return principal + 2.0 * pi * std::round((theta - principal) / (2.0 * pi));
}

}  // namespace

double minimum_position(double theta, const LatticeParams& params, int mf_sign) {
  const double k = params.wavenumber();
  return (pi + carrier_phase(theta, params, mf_sign)) / (2.0 * k);
}

double minimum_displacement_simplified(double theta, const LatticeParams& params) {
  return theta / (2.0 * params.wavenumber());
}

double minimum_velocity(double theta, double beta, const LatticeParams& params,
                        int mf_sign) {
  // d phi / d theta for tan(phi) = s (U1/U0) tan(theta)
  const double c = std::cos(theta);
  const double s = mf_sign * (params.u1_j / params.u0_j) * std::sin(theta);
  const double ratio = mf_sign * params.u1_j / params.u0_j;
  const double dphi = ratio / (c * c + s * s);
  return beta * dphi / (2.0 * params.wavenumber());
}

LatticeParams params_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("params json: ") + e.what());
  }
  try {
    AtomSpecies atom = AtomSpecies::cesium();
    if (doc.contains("mass_kg")) atom.mass_kg = doc["mass_kg"].get<double>();
    if (doc.contains("F")) atom.f = doc["F"].get<int>();
    if (doc.contains("mF")) atom.mf = doc["mF"].get<int>();
    if (doc.contains("hyperfine_GHz"))
      atom.hyperfine_splitting_hz = doc["hyperfine_GHz"].get<double>() * 1e9;
    const double u0 = units::uK_to_joule(doc.at("U0_uK").get<double>());
    const double a = units::um_to_m(doc.at("a_um").get<double>());
    const double ratio = doc.value("ratio", 0.0);
    return LatticeParams::make(u0, a, atom, ratio);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("params json: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("params json: ") + e.what());
  }
}

std::string params_to_json(const LatticeParams& params) {
  nlohmann::ordered_json doc;
  doc["U0_uK"] = units::joule_to_uK(params.u0_j);
  doc["a_um"] = units::m_to_um(params.lattice_const_m);
  doc["F"] = params.atom.f;
  doc["mF"] = params.atom.mf;
  doc["ratio"] = params.depth_ratio();
  doc["mass_kg"] = params.atom.mass_kg;
  doc["hyperfine_GHz"] = params.atom.hyperfine_splitting_hz * 1e-9;
  return doc.dump(2);
}

}  // namespace latcomp::optics
