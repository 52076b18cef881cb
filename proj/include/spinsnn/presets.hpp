#pragma once

#include "spinsnn/magnet.hpp"

// Reference device stacks with calibrated material constants. Geometry and
// materials are fixed here so that simulations, tests, and the CLI all talk
// about the same three magnets:
//
//  * stochastic_neuron_magnet — an in-plane ellipse written through a
//    spin-Hall underlayer. Its anisotropy is calibrated so a 71 uA, 0.5 ns
//    charge pulse switches with probability 1/2, which makes the
//    current-to-probability transfer curve a usable sigmoid activation.
//  * nonvolatile_storage_magnet — a perpendicular dot with a 60 kT barrier,
//    the long-retention binary storage element.
//  * volatile_synapse_magnet — a tilt-leak element whose between-pulse
//    relaxation (~2.4 ns) separates densely from sparsely timed pulse
//    trains: the short-term/long-term plasticity device.
//
// The calibrated numbers were fixed by Monte Carlo against the integrator in
// magnet.hpp (stochastic Heun, 1 ps steps) and are covered by regression
// tests; change them only together with those tests.

namespace spinsnn {

// In-plane ellipse, 100 x 40 x 1.2 nm, Ms = 1e6 A/m, written via the default
// spin-Hall stack (gain 6). Ku2 is the calibration knob: at 1.004e5 J/m^3
// (barrier 91.4 kT at 300 K) the measured switching probability for a
// 71 uA / 0.5 ns write is 0.509 +/- 0.006 (8000 trials), and the transfer
// curve spans P = 0 at 30 uA to P = 0.999 at 140 uA.
inline MagnetParams stochastic_neuron_magnet() {
  MagnetParams p;
  p.ms_A_per_m = 1e6;
  p.volume_m3 = 0.25 * 3.14159265358979323846 * 100e-9 * 40e-9 * 1.2e-9;
  p.ku2_J_per_m3 = 1.004e5;
  p.alpha = 0.01;
  p.temperature_K = 300.0;
  p.polarization = 0.7;
  p.easy_axis = {1, 0, 0};  // long axis of the ellipse, in the film plane
  return p;
}

// Heavy-metal write path matching stochastic_neuron_magnet: theta_SH = 0.3,
// 40 nm wide free layer over a 2 nm underlayer, charge-to-spin gain 6.
inline SheParams stochastic_write_stack() { return SheParams{}; }

// Nominal write amplitude for the stochastic element: the P = 0.5 point.
inline constexpr double stochastic_write_i50_A = 71e-6;

// Perpendicular CoFeB dot, 40 nm diameter x 1.5 nm, Ms = 1.2e6 A/m. The
// anisotropy sets a 60 kT barrier: Arrhenius retention at tau0 = 1 ns is
// ~1e17 s, i.e. the element holds a bit for any practical purpose.
inline MagnetParams nonvolatile_storage_magnet() {
  MagnetParams p;
  p.ms_A_per_m = 1.2e6;
  p.volume_m3 = 0.25 * 3.14159265358979323846 * 40e-9 * 40e-9 * 1.5e-9;
  p.ku2_J_per_m3 = 1.3184e5;
  p.alpha = 0.02;
  p.temperature_K = 300.0;
  p.polarization = 0.65;
  return p;
}

// Tilt-leak element for interval-selective plasticity. The barrier (120 kT)
// keeps single pulses from switching it, while the anisotropy field sets a
// 2.4 ns transverse relaxation time: tilt accumulated by one pulse survives
// a 2 ns gap but not a 5 ns one. Driven through the stack (spin-transfer
// torque, polarization 0.7).
inline MagnetParams volatile_synapse_magnet() {
  MagnetParams p;
  p.ms_A_per_m = 1e6;
  p.volume_m3 = 4.19570545e-24;     // ~105 x 51 x 1.0 nm ellipse
  p.ku2_J_per_m3 = 118462.472;      // barrier 120 kT, Hk = 1.885e5 A/m
  p.alpha = 0.01;
  p.temperature_K = 300.0;
  p.polarization = 0.7;
  return p;
}

// Operating point for the five-pulse interval-discrimination experiment:
// 1 ns pulses at this amplitude switch volatile_synapse_magnet with
// P = 0.94 when spaced 3 ns start-to-start and P = 0.06 when spaced 6 ns
// (4000 trials each). The amplitude is 4.70x the critical spin current,
// quoted as charge current through the polarization-0.7 stack.
inline constexpr double volatile_drive_amplitude_A = 2.028e-4;
inline constexpr double volatile_pulse_width_s = 1e-9;
inline constexpr double volatile_dense_interval_s = 3e-9;
inline constexpr double volatile_sparse_interval_s = 6e-9;

}  // namespace spinsnn
