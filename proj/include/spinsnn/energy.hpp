#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

// Per-event energy accounting. Every simulated hardware event lands in one
// ledger counter together with its energy; nothing charges silently. Costs
// are either computed physically at the call site (I^2*R*t, V^2*G*t) or taken
// from the defaults table below. The CMOS comparison point is deliberately a
// user-supplied constant -- the simulator measures only its own devices.

namespace spinsnn {

enum class EnergyEvent : int {
  SynapseRead = 0,   // synapse conduction during a read/integrate cycle
  DwWrite,           // domain-wall programming / write-phase advance
  DwReset,           // domain-wall reset traversal
  NeuronWrite,       // neuron write cycle (any kind)
  NeuronReset,       // neuron reset after a spike
  StochasticRead,    // readout of a stochastic neuron state
  DigitalAdd,        // digital partial-sum addition across array tiles
};

inline constexpr int kEnergyEventCount = 7;

inline constexpr std::array<std::string_view, kEnergyEventCount> kEnergyEventNames = {
    "synapse_read", "dw_write", "dw_reset", "neuron_write",
    "neuron_reset", "stochastic_read", "digital_add"};

inline constexpr std::string_view to_string(EnergyEvent e) {
  return kEnergyEventNames[static_cast<int>(e)];
}

inline EnergyEvent energy_event_from_string(std::string_view name) {
  for (int i = 0; i < kEnergyEventCount; ++i)
    if (kEnergyEventNames[i] == name) return static_cast<EnergyEvent>(i);
  throw std::invalid_argument("unknown energy event: " + std::string(name));
}

// Defaults for events whose cost is a tabulated device constant rather than a
// live I^2*R*t computation. The write+reset pair for a domain-wall device
// lands on 0.1 fJ; a stochastic-neuron write cycle is ~1 fJ; a step-neuron
// decision ~15 fJ.
struct EnergyCosts {
  double dw_write_J = 0.05e-15;
  double dw_reset_J = 0.05e-15;
  double stochastic_write_J = 1e-15;
  double stochastic_read_J = 1.25e-17;  // 50 mV readout through ~5 uS for 1 ns
  double step_decision_J = 15e-15;
  double digital_add_J = 1e-15;         // user-tunable digital-adder constant
};

class EnergyLedger {
 public:
  void charge(EnergyEvent e, double joules) {
    if (joules < 0.0) throw std::invalid_argument("ledger: energy must be >= 0");
    const auto i = static_cast<std::size_t>(e);
    counts_[i] += 1;
    joules_[i] += joules;
  }

  void charge_n(EnergyEvent e, std::uint64_t n, double joules_each) {
    if (joules_each < 0.0) throw std::invalid_argument("ledger: energy must be >= 0");
    const auto i = static_cast<std::size_t>(e);
    counts_[i] += n;
    joules_[i] += joules_each * static_cast<double>(n);
  }

  // n events whose individual costs were already summed by the caller (bulk
  // accounting for per-device-varying costs, e.g. synaptic read currents).
  void charge_total(EnergyEvent e, std::uint64_t n, double total_joules) {
    if (total_joules < 0.0) throw std::invalid_argument("ledger: energy must be >= 0");
    const auto i = static_cast<std::size_t>(e);
    counts_[i] += n;
    joules_[i] += total_joules;
  }

  std::uint64_t count(EnergyEvent e) const { return counts_[static_cast<std::size_t>(e)]; }
  double energy_J(EnergyEvent e) const { return joules_[static_cast<std::size_t>(e)]; }

  std::uint64_t total_events() const {
    std::uint64_t s = 0;
    for (auto c : counts_) s += c;
    return s;
  }
  double total_energy_J() const {
    double s = 0.0;
    for (auto j : joules_) s += j;
    return s;
  }

  // Elementwise merge; ledgers from independent work units add exactly.
  void merge(const EnergyLedger& o) {
    for (int i = 0; i < kEnergyEventCount; ++i) {
      counts_[i] += o.counts_[i];
      joules_[i] += o.joules_[i];
    }
  }

  bool operator==(const EnergyLedger& o) const = default;

  // Fixed-order CSV (one row per event type), 9 significant digits.
  std::string to_csv() const {
    std::string out = "event,count,energy_J\n";
    char line[128];
    for (int i = 0; i < kEnergyEventCount; ++i) {
      std::snprintf(line, sizeof(line), "%s,%llu,%.9g\n",
                    std::string(kEnergyEventNames[i]).c_str(),
                    static_cast<unsigned long long>(counts_[i]), joules_[i]);
      out += line;
    }
    return out;
  }

  static EnergyLedger from_csv(const std::string& text);

 private:
  std::array<std::uint64_t, kEnergyEventCount> counts_{};
  std::array<double, kEnergyEventCount> joules_{};
};

inline EnergyLedger EnergyLedger::from_csv(const std::string& text) {
  EnergyLedger led;
  std::size_t pos = 0;
  int lineno = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    const std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1) {
      if (line != "event,count,energy_J")
        throw std::invalid_argument("ledger csv: bad header line: " + line);
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw std::invalid_argument("ledger csv: malformed row at line " +
                                  std::to_string(lineno));
    const EnergyEvent e = energy_event_from_string(line.substr(0, c1));
    const auto i = static_cast<std::size_t>(e);
    led.counts_[i] = std::stoull(line.substr(c1 + 1, c2 - c1 - 1));
    led.joules_[i] = std::stod(line.substr(c2 + 1));
  }
  return led;
}

}  // namespace spinsnn
