#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spinsnn/constants.hpp"

// Behavioral compact models for the resistive devices: a domain-wall (DW)
// track read through a magnetic tunnel junction, the MTJ bias roll-off, and
// a lateral spin valve (LSV) injection path. These are the building blocks
// the synapse and neuron modules compose; everything here is pure algebra.

namespace spinsnn {

// --- MTJ conductance with bias roll-off ---------------------------------------

// Two-state junction. The antiparallel conductance rises with bias such that
// TMR(V) = TMR(0) / (1 + (V/V_h)^2); the parallel conductance is bias-flat.
// That pins G_AP(V) = G_P (1+v^2)/(r+v^2) with r = G_P/G_AP(0), v = V/V_h:
// G_AP(0) at zero bias, -> G_P at large bias, monotone in between.
struct MtjParams {
  double g_p_S = 20e-6;    // parallel-state conductance [S]
  double g_ap_S = 10e-6;   // antiparallel-state conductance at zero bias [S]
  double v_h_V = 0.5;      // bias where TMR has dropped to half [V]

  void validate() const {
    if (g_p_S <= 0.0) throw std::invalid_argument("mtj: G_P must be > 0");
    if (g_ap_S <= 0.0) throw std::invalid_argument("mtj: G_AP must be > 0");
    if (g_ap_S > g_p_S) throw std::invalid_argument("mtj: G_AP must not exceed G_P");
    if (v_h_V <= 0.0) throw std::invalid_argument("mtj: V_h must be > 0");
  }

  double tmr_percent() const { return (g_p_S / g_ap_S - 1.0) * 100.0; }
};

inline double mtj_conductance_ap(const MtjParams& p, double bias_V) {
  p.validate();
  const double v2 = (bias_V / p.v_h_V) * (bias_V / p.v_h_V);
  const double r = p.g_p_S / p.g_ap_S;
  return p.g_p_S * (1.0 + v2) / (r + v2);
}

inline double mtj_conductance(const MtjParams& p, bool parallel, double bias_V) {
  return parallel ? (p.validate(), p.g_p_S) : mtj_conductance_ap(p, bias_V);
}

// --- Domain-wall track ---------------------------------------------------------

// A DW track of length L read through an MTJ stack: the region behind the wall
// reads parallel, the region ahead antiparallel, plus a fixed wall-region
// conductance. Wall position x in [0, L] is the analog state variable.
//
// Wall motion is the 1-D rigid model: velocity = mobility * current, capped at
// v_sat. The default mobility is pinned by the calibration point "10.6 uA for
// 2 ns traverses an 80 nm track".
struct DwDeviceParams {
  double track_length_m = 80e-9;
  double mobility_m_per_As = 80e-9 / (10.6e-6 * 2e-9);  // 3.7736e6 m/(A*s)
  double v_sat_m_per_s = 100.0;    // saturation wall velocity
  double g_dw_S = 0.0;             // fixed wall-region conductance [S]
  double r_hm_ohm = 222.5;         // heavy-metal programming-path resistance
  MtjParams mtj;                   // read stack

  void validate() const {
    if (track_length_m <= 0.0) throw std::invalid_argument("dw: track length must be > 0");
    if (mobility_m_per_As <= 0.0) throw std::invalid_argument("dw: mobility must be > 0");
    if (v_sat_m_per_s <= 0.0) throw std::invalid_argument("dw: v_sat must be > 0");
    if (g_dw_S < 0.0) throw std::invalid_argument("dw: wall conductance must be >= 0");
    if (r_hm_ohm <= 0.0) throw std::invalid_argument("dw: R_HM must be > 0");
    mtj.validate();
  }
};

struct DwDeviceState {
  double x_m = 0.0;  // wall position, 0 = fully antiparallel, L = fully parallel
};

// Device conductance at wall position x under read bias V.
inline double dw_conductance(const DwDeviceParams& p, const DwDeviceState& s,
                             double bias_V = 0.0) {
  p.validate();
  if (s.x_m < 0.0 || s.x_m > p.track_length_m)
    throw std::invalid_argument("dw: wall position outside [0, L]");
  const double frac = s.x_m / p.track_length_m;
  return p.mtj.g_p_S * frac + mtj_conductance_ap(p.mtj, bias_V) * (1.0 - frac) + p.g_dw_S;
}

// Advance the wall under a current pulse of duration dt. Displacement is
// sign(I) * min(mobility*|I|, v_sat) * dt, clamped to the track.
inline DwDeviceState dw_advance(const DwDeviceParams& p, const DwDeviceState& s,
                                double current_A, double dt_s) {
  p.validate();
  if (dt_s < 0.0) throw std::invalid_argument("dw: pulse duration must be >= 0");
  const double v = std::min(p.mobility_m_per_As * std::fabs(current_A), p.v_sat_m_per_s);
  const double dx = (current_A >= 0.0 ? v : -v) * dt_s;
  DwDeviceState out;
  out.x_m = std::clamp(s.x_m + dx, 0.0, p.track_length_m);
  return out;
}

// Energy dissipated in the heavy-metal programming path by one pulse [J].
inline double dw_programming_energy(const DwDeviceParams& p, double current_A,
                                    double dt_s) {
  return current_A * current_A * p.r_hm_ohm * dt_s;
}

// --- Lateral spin valve ---------------------------------------------------------

// Non-local spin injection: the spin current arriving a distance d from the
// injector decays with the spin-flip length, Is = P * Iq * exp(-d / lambda_sf).
struct LsvParams {
  double polarization = 0.7;
  double lambda_sf_m = 1e-6;  // spin-flip relaxation length in the channel

  void validate() const {
    if (polarization < 0.0 || polarization > 1.0)
      throw std::invalid_argument("lsv: polarization must be in [0, 1]");
    if (lambda_sf_m <= 0.0) throw std::invalid_argument("lsv: lambda_sf must be > 0");
  }
};

inline double lsv_injected_current(const LsvParams& p, double charge_current_A,
                                   double separation_m) {
  p.validate();
  if (separation_m < 0.0) throw std::invalid_argument("lsv: separation must be >= 0");
  return p.polarization * charge_current_A * std::exp(-separation_m / p.lambda_sf_m);
}

}  // namespace spinsnn
