#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "spinsnn/devices.hpp"
#include "spinsnn/energy.hpp"
#include "spinsnn/magnet.hpp"

// Neuron device models, from fully physical to behavioral:
//
//  * step       -- hard-axis-preset mono-domain magnet; the synaptic current
//                  tips it to one of the easy-axis wells. A thresholding
//                  element (sign detector), thermally noisy near zero input.
//  * non-step   -- domain-wall track read differentially; transduces input
//                  current to a clipped-linear output (ramp with saturation).
//  * integrate-fire -- domain-wall track as integrator: input advances the
//                  wall, leak retreats it, spike + reset on full traversal.
//  * stochastic -- mono-domain magnet written once per cycle with a
//                  sub-deterministic pulse; fires with the probability the
//                  switching characterization assigns to the write amplitude.
//  * reference LIF -- plain leaky integrate-and-fire ODE, the software
//                  baseline the device neurons are validated against.
//
// All spiking neurons expose step functions that consume one write cycle of
// input and charge the energy ledger for the device events they perform.

namespace spinsnn {

// Per-timestep phase durations of the mixed-signal cycle: synapses conduct
// during `read`, the neuron write pulse lasts `write`, spike handling and
// reset fit in `reset`.
struct TimestepSchedule {
  double read_s = 1e-9;
  double write_s = 0.5e-9;
  double reset_s = 0.5e-9;

  void validate() const {
    if (read_s <= 0.0 || write_s <= 0.0 || reset_s <= 0.0)
      throw std::invalid_argument("schedule: phase durations must be > 0");
  }
  double period_s() const { return read_s + write_s + reset_s; }
};

// --- Step (sign-detecting) neuron -------------------------------------------------

struct StepNeuronParams {
  MagnetParams magnet;
  double eval_window_s = 2e-9;    // drive window after the hard-axis preset
  double settle_window_s = 2e-9;  // zero-drive relaxation before readout
  double dt_s = 1e-12;

  void validate() const {
    magnet.validate();
    if (eval_window_s <= 0.0 || settle_window_s < 0.0 || dt_s <= 0.0)
      throw std::invalid_argument("step neuron: windows/dt must be positive");
  }
};

// Deterministic unit vector perpendicular to e (the hard-axis preset state).
inline Vec3 hard_axis_of(const Vec3& e) {
  // Cross with the coordinate axis least aligned with e.
  const double ax = std::fabs(e.x), ay = std::fabs(e.y), az = std::fabs(e.z);
  Vec3 basis{1, 0, 0};
  if (ay <= ax && ay <= az) basis = {0, 1, 0};
  else if (az <= ax && az <= ay) basis = {0, 0, 1};
  return normalized(cross(e, basis));
}

// One decision cycle: preset on the hard axis, drive with the synaptic
// current (spins along +-e by input sign), relax, read out the sign.
// Zero input at finite temperature is a thermal coin flip; at T = 0 the
// degenerate tie resolves to "no spike".
inline bool step_neuron_decide(const StepNeuronParams& p, double i_syn_A,
                               RngStream& rng, EnergyLedger& ledger,
                               const EnergyCosts& costs) {
  p.validate();
  const Vec3 e = p.magnet.unit_easy_axis();
  LlgIntegrator integ(p.magnet, p.dt_s);

  Vec3 m = hard_axis_of(e);
  const Vec3 is = e * (p.magnet.polarization * i_syn_A);
  auto steps = static_cast<std::int64_t>(std::llround(p.eval_window_s / p.dt_s));
  for (std::int64_t k = 0; k < steps; ++k) m = integ.step(m, is, {}, rng);
  steps = static_cast<std::int64_t>(std::llround(p.settle_window_s / p.dt_s));
  for (std::int64_t k = 0; k < steps; ++k) m = integ.step(m, {}, {}, rng);

  ledger.charge(EnergyEvent::NeuronWrite, costs.step_decision_J);
  return dot(m, e) > 0.0;
}

// --- Non-step (clipped-linear) neuron ----------------------------------------------

struct NonStepNeuronParams {
  DwDeviceParams dev;
  double write_cycle_s = 2e-9;
  double i_out_max_A = 10.6e-6;  // output at full traversal

  void validate() const {
    dev.validate();
    if (write_cycle_s <= 0.0) throw std::invalid_argument("nonstep: write cycle must be > 0");
    if (i_out_max_A <= 0.0) throw std::invalid_argument("nonstep: output scale must be > 0");
  }
};

// Memoryless transfer: each cycle starts from a reset track, the input pulse
// pushes the wall, the final position is read as an output current. Clipped
// linear: zero below cutoff (wall pinned at 0 for i <= 0), linear ramp,
// saturation at full traversal. Zero input performs no device work.
inline double nonstep_neuron_transfer(const NonStepNeuronParams& p, double i_in_A,
                                      EnergyLedger& ledger) {
  p.validate();
  const DwDeviceState end = dw_advance(p.dev, {0.0}, i_in_A, p.write_cycle_s);
  if (i_in_A != 0.0) {
    const double e_write = dw_programming_energy(p.dev, i_in_A, p.write_cycle_s);
    ledger.charge(EnergyEvent::NeuronWrite, e_write);
    // Symmetric return pulse parks the wall for the next cycle.
    if (end.x_m > 0.0) ledger.charge(EnergyEvent::NeuronReset, e_write);
  }
  return p.i_out_max_A * (end.x_m / p.dev.track_length_m);
}

// --- Integrate-and-fire (domain wall) neuron ---------------------------------------

struct IfNeuronParams {
  DwDeviceParams dev;
  double leak_current_A = 0.0;   // steady retreat drive
  double write_cycle_s = 2e-9;
  double threshold_frac = 1.0;   // spike when x >= frac * L

  void validate() const {
    dev.validate();
    if (leak_current_A < 0.0) throw std::invalid_argument("if: leak must be >= 0");
    if (write_cycle_s <= 0.0) throw std::invalid_argument("if: write cycle must be > 0");
    if (threshold_frac <= 0.0 || threshold_frac > 1.0)
      throw std::invalid_argument("if: threshold fraction must be in (0, 1]");
  }
};

struct IfNeuronState {
  DwDeviceState dw;
};

// One write cycle: the net of input and leak currents moves the wall (the two
// drives superpose on the programming path), a full-threshold excursion emits
// a spike and resets the wall to the start of the track. The membrane
// "potential" is the wall position; it cannot go below 0 wall (hard floor), which
// is exactly the one-sided rectification the rate-based correspondence needs.
inline bool if_neuron_step(const IfNeuronParams& p, IfNeuronState& st, double i_in_A,
                           EnergyLedger& ledger, const EnergyCosts& costs) {
  p.validate();
  const double net = i_in_A - p.leak_current_A;
  st.dw = dw_advance(p.dev, st.dw, net, p.write_cycle_s);
  if (net != 0.0)
    ledger.charge(EnergyEvent::NeuronWrite,
                  dw_programming_energy(p.dev, net, p.write_cycle_s));

  const double threshold = p.threshold_frac * p.dev.track_length_m;
  if (st.dw.x_m >= threshold * (1.0 - 1e-12)) {
    st.dw.x_m = 0.0;
    ledger.charge(EnergyEvent::NeuronReset, costs.dw_reset_J);
    return true;
  }
  return false;
}

// --- Stochastic (probabilistic write) neuron ---------------------------------------

// Lookup backend: the switching characterization measured once for the device
// is the neuron's activation function.
struct StochasticNeuronParams {
  SwitchingCharacterization curve;

  void validate() const {
    if (curve.currents_A.size() < 2 || curve.currents_A.size() != curve.p.size())
      throw std::invalid_argument("stochastic neuron: invalid switching curve");
    if (curve.pulse_width_s <= 0.0)
      throw std::invalid_argument("stochastic neuron: curve has no write-cycle width");
  }
};

inline double stochastic_fire_probability(const StochasticNeuronParams& p,
                                          double i_write_A) {
  p.validate();
  return interp_switching_probability(p.curve, i_write_A);
}

// One write/read/reset cycle. Fires with the characterized probability for
// this write amplitude; the reset write-back after a spike costs another
// write. Amplitudes beyond the characterized grid are an operating-point
// error, not a clamp.
inline bool stochastic_neuron_step(const StochasticNeuronParams& p, double i_write_A,
                                   RngStream& rng, EnergyLedger& ledger,
                                   const EnergyCosts& costs) {
  const double fire_p = stochastic_fire_probability(p, i_write_A);
  ledger.charge(EnergyEvent::NeuronWrite, costs.stochastic_write_J);
  ledger.charge(EnergyEvent::StochasticRead, costs.stochastic_read_J);
  const bool fired = rng.bernoulli(fire_p);
  if (fired) ledger.charge(EnergyEvent::NeuronReset, costs.stochastic_write_J);
  return fired;
}

// Monte Carlo backend: run the actual magnet through one write cycle instead
// of consulting the lookup curve. Slow; used to cross-check the lookup path.
inline bool stochastic_neuron_mc_fire(const MagnetParams& magnet, const SheParams& she,
                                      double i_write_A, const SwitchingProtocol& proto,
                                      RngStream& rng, EnergyLedger& ledger,
                                      const EnergyCosts& costs) {
  magnet.validate();
  const Vec3 e = magnet.unit_easy_axis();
  LlgIntegrator integ(magnet, proto.dt_s);
  Vec3 m = e;
  auto steps = static_cast<std::int64_t>(std::llround(proto.thermalize_s / proto.dt_s));
  for (std::int64_t k = 0; k < steps; ++k) m = integ.step(m, {}, {}, rng);
  const Vec3 is = e * (-she_spin_current(she, i_write_A));
  steps = static_cast<std::int64_t>(std::llround(proto.pulse_width_s / proto.dt_s));
  for (std::int64_t k = 0; k < steps; ++k) m = integ.step(m, is, {}, rng);

  ledger.charge(EnergyEvent::NeuronWrite, costs.stochastic_write_J);
  ledger.charge(EnergyEvent::StochasticRead, costs.stochastic_read_J);
  const bool fired = dot(m, e) < 0.0;
  if (fired) ledger.charge(EnergyEvent::NeuronReset, costs.stochastic_write_J);
  return fired;
}

// --- Reference leaky integrate-and-fire --------------------------------------------

// Software baseline: C dV/dt = -V/R + I, spike and reset at threshold,
// optional absolute refractory period. Charges nothing: it has no device.
struct ReferenceLifParams {
  double r_ohm = 1e6;
  double c_F = 1e-12;
  double v_th_V = 0.02;
  double v_reset_V = 0.0;
  double refractory_s = 0.0;

  void validate() const {
    if (r_ohm <= 0.0 || c_F <= 0.0) throw std::invalid_argument("lif: R, C must be > 0");
    if (v_th_V <= v_reset_V) throw std::invalid_argument("lif: threshold must exceed reset");
    if (refractory_s < 0.0) throw std::invalid_argument("lif: refractory must be >= 0");
  }
};

struct ReferenceLifState {
  double v_V = 0.0;
  double refractory_left_s = 0.0;
};

inline bool reference_lif_step(const ReferenceLifParams& p, ReferenceLifState& st,
                               double i_in_A, double dt_s) {
  p.validate();
  if (dt_s <= 0.0) throw std::invalid_argument("lif: dt must be > 0");
  if (st.refractory_left_s > 0.0) {
    st.refractory_left_s -= dt_s;
    st.v_V = p.v_reset_V;
    return false;
  }
  st.v_V += dt_s * (-st.v_V / (p.r_ohm * p.c_F) + i_in_A / p.c_F);
  if (st.v_V >= p.v_th_V) {
    st.v_V = p.v_reset_V;
    st.refractory_left_s = p.refractory_s;
    return true;
  }
  return false;
}

// Closed-form inter-spike period under constant drive (from reset at 0):
// T = refractory + RC ln(IR / (IR - V_th)); infinite below rheobase.
inline double reference_lif_period(const ReferenceLifParams& p, double i_const_A) {
  p.validate();
  const double v_inf = i_const_A * p.r_ohm;  // steady-state membrane voltage
  if (v_inf <= p.v_th_V) return std::numeric_limits<double>::infinity();  // below rheobase
  return p.refractory_s +
         p.r_ohm * p.c_F * std::log((v_inf - p.v_reset_V) / (v_inf - p.v_th_V));
}

}  // namespace spinsnn
