#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "spinsnn/pulse.hpp"

// Spike-timing-dependent plasticity, as the peripheral programming circuit
// realizes it: exponential timing windows in both directions,
//
//   dw(+dt) = +A_plus  * exp(-dt/tau_plus)     (pre before post)
//   dw(-dt) = -A_minus * exp(+dt/tau_minus)    (post before pre)
//
// mapped onto programming-current pulses I(dt) = I0 * exp(-|dt|/tau) of fixed
// duration t_prog. The programming pulse is orders of magnitude shorter than
// the timing constants (t_prog <= tau/100 enforced), so the current sampled at
// the post event is effectively constant over the pulse.
//
// In probabilistic mode the same magnitudes are interpreted as switching
// probabilities for binary synapses, capped at p_max (low-probability,
// "non-greedy" updates).

namespace spinsnn {

enum class StdpMode { Analog, Probabilistic };
enum class StdpPairing { LastPre, NearestNeighbor };

struct StdpParams {
  double a_plus = 0.01;        // potentiation amplitude [weight units or probability]
  double a_minus = 0.01;       // depression amplitude
  double tau_plus_s = 20e-6;   // potentiation window
  double tau_minus_s = 20e-6;  // depression window
  StdpMode mode = StdpMode::Analog;
  StdpPairing pairing = StdpPairing::LastPre;
  double p_max = 0.1;          // probabilistic-mode cap
  double t_prog_s = 1e-9;      // programming pulse duration
  double i0_scale_A = 1e-3;    // programming current per unit amplitude [A]
  double window_tau_mult = 5.0;     // pairing window span, in units of tau
  double neg_window_delay_s = 0.0;  // 0 -> defaults to the negative window span

  void validate() const {
    if (a_plus < 0.0 || a_minus < 0.0)
      throw std::invalid_argument("stdp: amplitudes must be >= 0");
    if (tau_plus_s <= 0.0 || tau_minus_s <= 0.0)
      throw std::invalid_argument("stdp: time constants must be > 0");
    if (t_prog_s <= 0.0) throw std::invalid_argument("stdp: t_prog must be > 0");
    if (t_prog_s > std::min(tau_plus_s, tau_minus_s) / 100.0)
      throw std::invalid_argument(
          "stdp: t_prog must be <= tau/100 (pulse must not smear the timing window)");
    if (p_max <= 0.0 || p_max > 1.0)
      throw std::invalid_argument("stdp: p_max must be in (0, 1]");
    if (i0_scale_A <= 0.0) throw std::invalid_argument("stdp: i0 scale must be > 0");
    if (window_tau_mult <= 0.0) throw std::invalid_argument("stdp: window must be > 0");
    if (neg_window_delay_s < 0.0)
      throw std::invalid_argument("stdp: negative window delay must be >= 0");
  }

  double positive_window_s() const { return window_tau_mult * tau_plus_s; }
  double negative_window_s() const { return window_tau_mult * tau_minus_s; }
  // POST sampling instant: the post spike is observed after the negative
  // window has fully elapsed, so pre spikes inside it can still be paired.
  double post_sampling_delay_s() const {
    return neg_window_delay_s > 0.0 ? neg_window_delay_s : negative_window_s();
  }
};

// Weight change (or flip probability, in probabilistic mode) for a pairing
// delay dt = t_post - t_pre. dt = 0 takes the potentiation branch (limit from
// the causal side).
inline double stdp_delta(const StdpParams& p, double dt_s) {
  p.validate();
  double d;
  if (dt_s >= 0.0)
    d = p.a_plus * std::exp(-dt_s / p.tau_plus_s);
  else
    d = -p.a_minus * std::exp(dt_s / p.tau_minus_s);
  if (p.mode == StdpMode::Probabilistic) d = std::clamp(d, -p.p_max, p.p_max);
  return d;
}

// Programming pulse realizing stdp_delta(dt): current magnitude
// i0_scale * A * exp(-|dt|/tau), signed (+ potentiate / - depress), duration
// t_prog. Composed with the domain-wall mobility this yields a conductance
// change proportional to stdp_delta as long as the wall stays below
// velocity saturation and away from the track ends.
inline Pulse programming_current(const StdpParams& p, double dt_s) {
  p.validate();
  double mag, sign;
  if (dt_s >= 0.0) {
    mag = p.i0_scale_A * p.a_plus * std::exp(-dt_s / p.tau_plus_s);
    sign = 1.0;
  } else {
    mag = p.i0_scale_A * p.a_minus * std::exp(dt_s / p.tau_minus_s);
    sign = -1.0;
  }
  return Pulse{0.0, p.t_prog_s, sign * mag};
}

// One scheduled plasticity event for a single synapse.
struct StdpEvent {
  double emit_t_s = 0.0;   // when the programming pulse fires (POST sampling instant)
  double delta_t_s = 0.0;  // the pairing delay t_post - t_pre it encodes
  Pulse pulse;             // signed programming pulse
};

// Pair one synapse's pre/post spike trains into programming events.
//
//  * Potentiation: each post spike pairs with a preceding pre spike within the
//    positive window. LastPre: the most recent pre (a pre may serve several
//    posts). NearestNeighbor: a pre is consumed by the first post that uses it.
//  * Depression: each pre spike arriving within the negative window after a
//    post pairs with that (most recent) post. NearestNeighbor consumes the
//    post after its first depressing pre.
//  * All pulses fire at t_post + post_sampling_delay (the POST line activates
//    only after the negative window has elapsed), so the schedule is causal.
//
// Inputs must be sorted ascending; simultaneous pre/post (dt = 0) pairs as
// potentiation.
inline std::vector<StdpEvent> stdp_event_schedule(const std::vector<double>& pre_t_s,
                                                  const std::vector<double>& post_t_s,
                                                  const StdpParams& p) {
  p.validate();
  for (std::size_t i = 1; i < pre_t_s.size(); ++i)
    if (pre_t_s[i] < pre_t_s[i - 1])
      throw std::invalid_argument("stdp schedule: pre spike times must be sorted");
  for (std::size_t i = 1; i < post_t_s.size(); ++i)
    if (post_t_s[i] < post_t_s[i - 1])
      throw std::invalid_argument("stdp schedule: post spike times must be sorted");

  std::vector<StdpEvent> events;
  const double delay = p.post_sampling_delay_s();

  // Potentiation pass.
  std::size_t consumed_pre = 0;  // NearestNeighbor watermark
  for (const double tp : post_t_s) {
    // Latest pre at or before tp.
    auto it = std::upper_bound(pre_t_s.begin(), pre_t_s.end(), tp);
    if (it == pre_t_s.begin()) continue;
    const std::size_t idx = static_cast<std::size_t>(it - pre_t_s.begin()) - 1;
    if (p.pairing == StdpPairing::NearestNeighbor) {
      if (idx < consumed_pre) continue;  // this pre already served an earlier post
      consumed_pre = idx + 1;
    }
    const double dt = tp - pre_t_s[idx];
    if (dt > p.positive_window_s()) continue;
    events.push_back({tp + delay, dt, programming_current(p, dt)});
  }

  // Depression pass: pre spikes falling inside the negative window after a post.
  std::size_t consumed_post = 0;
  for (const double tr : pre_t_s) {
    // Latest post strictly before this pre (dt = 0 belongs to potentiation).
    auto it = std::lower_bound(post_t_s.begin(), post_t_s.end(), tr);
    if (it == post_t_s.begin()) continue;
    const std::size_t idx = static_cast<std::size_t>(it - post_t_s.begin()) - 1;
    if (p.pairing == StdpPairing::NearestNeighbor) {
      if (idx < consumed_post) continue;
      consumed_post = idx + 1;
    }
    const double dt = post_t_s[idx] - tr;  // negative
    if (-dt > p.negative_window_s()) continue;
    events.push_back({post_t_s[idx] + delay, dt, programming_current(p, dt)});
  }

  std::sort(events.begin(), events.end(), [](const StdpEvent& a, const StdpEvent& b) {
    if (a.emit_t_s != b.emit_t_s) return a.emit_t_s < b.emit_t_s;
    return a.delta_t_s > b.delta_t_s;  // potentiation (larger dt) first on ties
  });
  return events;
}

// --- Homeostatic threshold -----------------------------------------------------

// Exponentially decaying firing threshold with a fixed post-spike increment:
// theta' = max(floor, theta * exp(-dt/tau) + increment * spiked).
// tau = 0 disables decay.
struct HomeostasisParams {
  double theta_increment = 0.0;
  double theta_decay_tau_s = 0.0;  // 0 -> no decay
  double theta_floor = 0.0;

  void validate() const {
    if (theta_increment < 0.0)
      throw std::invalid_argument("homeostasis: increment must be >= 0");
    if (theta_decay_tau_s < 0.0)
      throw std::invalid_argument("homeostasis: decay tau must be >= 0");
  }
};

inline double homeostasis_update(const HomeostasisParams& p, double theta, bool spiked,
                                 double dt_s) {
  p.validate();
  if (dt_s < 0.0) throw std::invalid_argument("homeostasis: dt must be >= 0");
  const double decayed =
      p.theta_decay_tau_s > 0.0 ? theta * std::exp(-dt_s / p.theta_decay_tau_s) : theta;
  return std::max(p.theta_floor, decayed + (spiked ? p.theta_increment : 0.0));
}

}  // namespace spinsnn
