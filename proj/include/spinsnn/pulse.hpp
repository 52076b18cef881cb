#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

// Piecewise-constant drive waveforms: a list of rectangular current pulses.
// Used for device characterization (switching trials, pulse trains for
// short/long-term plasticity sweeps) and by the CLI trajectory runner.

namespace spinsnn {

struct Pulse {
  double start_s = 0.0;     // pulse onset [s]
  double duration_s = 0.0;  // pulse width [s]
  double current_A = 0.0;   // charge current amplitude [A]
};

class PulseTrain {
 public:
  PulseTrain() = default;

  explicit PulseTrain(std::vector<Pulse> pulses) : pulses_(std::move(pulses)) {
    for (const auto& p : pulses_) {
      if (p.start_s < 0.0) throw std::invalid_argument("pulse start must be >= 0");
      if (p.duration_s < 0.0) throw std::invalid_argument("pulse duration must be >= 0");
    }
    std::sort(pulses_.begin(), pulses_.end(),
              [](const Pulse& a, const Pulse& b) { return a.start_s < b.start_s; });
  }

  // Evenly spaced train: n pulses of given width, period = start-to-start interval.
  static PulseTrain periodic(int n, double width_s, double period_s, double current_A,
                             double first_start_s = 0.0) {
    if (n < 0) throw std::invalid_argument("pulse count must be >= 0");
    if (width_s > period_s) throw std::invalid_argument("pulse width exceeds period");
    std::vector<Pulse> v;
    v.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      v.push_back({first_start_s + i * period_s, width_s, current_A});
    return PulseTrain(std::move(v));
  }

  static PulseTrain single(double width_s, double current_A, double start_s = 0.0) {
    return PulseTrain({{start_s, width_s, current_A}});
  }

  bool empty() const { return pulses_.empty(); }
  const std::vector<Pulse>& pulses() const { return pulses_; }

  // Instantaneous current at time t; overlapping pulses sum.
  double current_at(double t_s) const {
    double i = 0.0;
    for (const auto& p : pulses_) {
      if (t_s >= p.start_s && t_s < p.start_s + p.duration_s) i += p.current_A;
    }
    return i;
  }

  // End of the last pulse.
  double span_s() const {
    double end = 0.0;
    for (const auto& p : pulses_) end = std::max(end, p.start_s + p.duration_s);
    return end;
  }

 private:
  std::vector<Pulse> pulses_;
};

}  // namespace spinsnn
