#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spinsnn/devices.hpp"
#include "spinsnn/energy.hpp"
#include "spinsnn/magnet.hpp"
#include "spinsnn/pulse.hpp"
#include "spinsnn/rng.hpp"

// Synaptic devices built on the compact models in devices.hpp:
//
//  * MultibitSynapse  -- domain-wall track; analog conductance, programmed by
//                        current pulses through the heavy metal under the track.
//  * BinarySynapse    -- mono-domain MTJ; two conductance states, programmed
//                        stochastically (the write pulse switches with the
//                        probability measured by the switching characterization).
//  * VolatileSynapse  -- mono-domain magnet whose retention/accumulation
//                        dynamics realize short- vs long-term plasticity:
//                        closely spaced sub-critical pulses ratchet it over the
//                        barrier (LTP), sparse ones let it relax back (STP).
//
// Reads are side-effect free on device state; read-disturb is ignored below
// the configured threshold (read currents here are orders of magnitude under
// programming currents).

namespace spinsnn {

// Operating ceiling for synaptic read bias; above this the bias roll-off model
// loses validity. check helper used by array assembly/CLI validation.
inline constexpr double kMaxSynapseReadBiasV = 0.1;

inline bool synapse_bias_in_range(double bias_V) {
  return std::fabs(bias_V) <= kMaxSynapseReadBiasV;
}

// --- Multibit (domain wall) -----------------------------------------------------

struct MultibitSynapse {
  DwDeviceParams dev;
  DwDeviceState state;

  // Read current under bias V [A]; pure.
  double read_current(double bias_V) const {
    return dw_conductance(dev, state, bias_V) * bias_V;
  }

  double conductance(double bias_V = 0.0) const { return dw_conductance(dev, state, bias_V); }

  // Normalized weight in [0,1]: the wall fraction, recovered from the zero-bias
  // conductance read. Exact inverse of program_weight.
  double logical_weight() const {
    const double g = dw_conductance(dev, state, 0.0);
    return (g - dev.mtj.g_ap_S - dev.g_dw_S) / (dev.mtj.g_p_S - dev.mtj.g_ap_S);
  }

  // Direct weight placement (array initialization / external weight loading).
  void program_weight(double w) {
    if (w < 0.0 || w > 1.0)
      throw std::invalid_argument("multibit synapse: weight must be in [0, 1]");
    state.x_m = w * dev.track_length_m;
  }

  // One programming pulse through the heavy metal; charges the ledger with the
  // physically computed I^2 R t.
  void program(const Pulse& pulse, EnergyLedger& ledger) {
    state = dw_advance(dev, state, pulse.current_A, pulse.duration_s);
    ledger.charge(EnergyEvent::DwWrite,
                  dw_programming_energy(dev, pulse.current_A, pulse.duration_s));
  }
};

// --- Binary (stochastic MTJ) -----------------------------------------------------

struct BinarySynapse {
  MtjParams mtj;
  bool parallel = false;  // false = antiparallel = low weight

  double read_current(double bias_V) const {
    return mtj_conductance(mtj, parallel, bias_V) * bias_V;
  }
  double conductance(double bias_V = 0.0) const {
    return mtj_conductance(mtj, parallel, bias_V);
  }
  double logical_weight() const { return parallel ? 1.0 : 0.0; }
};

// Probabilistic programming: the pulse switches the junction with the
// probability the characterization curve assigns to its amplitude. Pulse
// polarity selects the target state (positive -> parallel / potentiate).
// Probabilities above p_max are a configuration error: the programming regime
// is deliberately restricted to the low-probability tail.
inline bool program_binary_stochastic(BinarySynapse& s, const Pulse& pulse,
                                      const SwitchingCharacterization& curve,
                                      double p_max, double r_hm_ohm,
                                      RngStream& rng, EnergyLedger& ledger) {
  if (pulse.duration_s != curve.pulse_width_s)
    throw std::invalid_argument(
        "binary synapse: pulse width does not match the characterized write cycle");
  const double p = interp_switching_probability(curve, std::fabs(pulse.current_A));
  if (p > p_max)
    throw std::invalid_argument("binary synapse: requested switching probability " +
                                std::to_string(p) + " exceeds p_max");

  ledger.charge(EnergyEvent::DwWrite,
                pulse.current_A * pulse.current_A * r_hm_ohm * pulse.duration_s);
  const bool target = pulse.current_A > 0.0;
  if (s.parallel != target && rng.bernoulli(p)) {
    s.parallel = target;
    return true;
  }
  return false;
}

// Behavioral flip used by the network training loop once the plasticity rule
// has already produced a flip probability. Same cap contract.
inline bool flip_with_probability(BinarySynapse& s, bool target_parallel, double p,
                                  double p_max, RngStream& rng) {
  if (p < 0.0) throw std::invalid_argument("binary synapse: probability must be >= 0");
  if (p > p_max)
    throw std::invalid_argument("binary synapse: flip probability exceeds p_max");
  if (s.parallel != target_parallel && rng.bernoulli(p)) {
    s.parallel = target_parallel;
    return true;
  }
  return false;
}

// --- Volatile (short/long-term plasticity) ----------------------------------------

// Mono-domain magnet driven through the stack (spin-transfer torque, injected
// spins antiparallel to the easy axis). Whether a pulse train switches it
// durably depends on the stimulation interval: the magnet integrates closely
// spaced pulses but leaks back between sparse ones.
struct VolatileSynapse {
  MagnetParams magnet;
  Vec3 m = {0, 0, 1};

  bool switched() const { return dot(m, magnet.unit_easy_axis()) < 0.0; }
};

struct StpLtpResult {
  bool switched = false;
  double final_projection = 1.0;  // m.e after the settle window
};

// Apply a pulse train plus settle window to one volatile synapse.
inline StpLtpResult stimulate_volatile(VolatileSynapse& syn, const PulseTrain& train,
                                       double settle_s, double dt_s, RngStream& rng) {
  const Vec3 e = syn.magnet.unit_easy_axis();
  LlgIntegrator integ(syn.magnet, dt_s);
  const double t_end = train.span_s() + settle_s;
  const auto n = static_cast<std::int64_t>(std::ceil(t_end / dt_s - 1e-12));
  Vec3 m = normalized(syn.m);
  for (std::int64_t k = 0; k < n; ++k) {
    const double iq = train.current_at((k + 0.5) * dt_s);
    // Through-stack STT: spin current = P * Iq, injected along -e.
    const Vec3 is = e * (-syn.magnet.polarization * iq);
    m = integ.step(m, is, {}, rng);
  }
  syn.m = m;
  return {dot(m, e) < 0.0, dot(m, e)};
}

// Monte Carlo switching probability for an n-pulse train at a given
// start-to-start interval. This is the Fig.-8-style experiment: short
// intervals accumulate (long-term transition), long intervals relax back
// (short-term behavior).
inline ProbabilityEstimate stp_ltp_probability(const MagnetParams& magnet, int n_pulses,
                                               double width_s, double interval_s,
                                               double amplitude_A, double settle_s,
                                               int trials, double dt_s,
                                               const RngStream& rng) {
  if (trials <= 0) throw std::invalid_argument("stp/ltp: trials must be > 0");
  const PulseTrain train = PulseTrain::periodic(n_pulses, width_s, interval_s, amplitude_A);
  int switched = 0;
  for (int k = 0; k < trials; ++k) {
    RngStream r = rng.substream(static_cast<std::uint64_t>(k));
    VolatileSynapse syn{magnet, magnet.unit_easy_axis()};
    if (stimulate_volatile(syn, train, settle_s, dt_s, r).switched) ++switched;
  }
  const double p = static_cast<double>(switched) / trials;
  return {p, std::sqrt(p * (1.0 - p) / trials), trials};
}

}  // namespace spinsnn
