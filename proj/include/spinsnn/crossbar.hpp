#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "spinsnn/energy.hpp"
#include "spinsnn/synapses.hpp"

// Resistive crossbar of dual-row synapses.
//
// Each logical input drives two physical rows at +dV and -dV; a signed weight
// maps to the conductance difference of the paired devices (positive on the
// plus row, negative on the minus row, the idle partner parked at the OFF
// conductance). Column current into the neuron write path (load conductance
// G_s to ground, solved nodally with conductances linearized at the nominal
// read bias):
//
//   I_j = sum_active_i dV (G+_ij - G-_ij) / (1 + gamma_j),
//   gamma_j = sum_all_i (G+_ij + G-_ij) / G_s
//
// Inactive inputs hold their rows at ground: they contribute no drive but
// still load the column, which is what gamma captures. `ideal` mode drops the
// loading term (the textbook dot product).
//
// Large input counts are split into tiles of `tile_rows` physical rows; each
// tile is its own electrical array with its own loading factor, and the
// per-tile partial currents are summed digitally (charged per addition).

namespace spinsnn {

struct CrossbarConfig {
  double read_bias_V = 0.05;     // +-dV applied to active rows
  double g_load_S = 1.0 / 222.5; // neuron write-path conductance G_s
  bool ideal = false;            // true: ignore column loading
  int tile_rows = 32;            // physical rows per electrical tile (logical inputs)
  double w_max = 1.0;            // full-scale logical weight
  double read_window_s = 1e-9;   // synapse conduction time per read event
  double write_path_r_ohm = 222.5;  // programming-path resistance (binary writes)

  void validate() const {
    if (!(read_bias_V > 0.0) || !synapse_bias_in_range(read_bias_V))
      throw std::invalid_argument("crossbar: read bias outside the valid synapse range");
    if (g_load_S <= 0.0) throw std::invalid_argument("crossbar: load conductance must be > 0");
    if (tile_rows < 1) throw std::invalid_argument("crossbar: tile_rows must be >= 1");
    if (w_max <= 0.0) throw std::invalid_argument("crossbar: w_max must be > 0");
    if (read_window_s <= 0.0) throw std::invalid_argument("crossbar: read window must be > 0");
    if (write_path_r_ohm <= 0.0) throw std::invalid_argument("crossbar: R_write must be > 0");
  }
};

template <class Synapse>
class Crossbar {
  static_assert(std::is_same_v<Synapse, MultibitSynapse> ||
                    std::is_same_v<Synapse, BinarySynapse>,
                "crossbar: unsupported synapse type");

 public:
  Crossbar(int inputs, int cols, const Synapse& prototype, const CrossbarConfig& cfg)
      : inputs_(inputs), cols_(cols), cfg_(cfg) {
    if (inputs < 1 || cols < 1)
      throw std::invalid_argument("crossbar: needs at least one input and one column");
    cfg_.validate();
    plus_.assign(cell_count(), prototype);
    minus_.assign(cell_count(), prototype);
    // Park both rows OFF (weight 0 everywhere).
    for (auto& s : plus_) park(s);
    for (auto& s : minus_) park(s);
    rebuild_cache();
  }

  int inputs() const { return inputs_; }
  int cols() const { return cols_; }
  int tile_count() const { return (inputs_ + cfg_.tile_rows - 1) / cfg_.tile_rows; }
  const CrossbarConfig& config() const { return cfg_; }

  // --- weights -------------------------------------------------------------

  // Signed logical weight from the zero-bias conductance difference.
  double weight(int i, int j) const {
    const std::size_t c = cell(i, j);
    return (plus_[c].logical_weight() - minus_[c].logical_weight()) * cfg_.w_max;
  }

  void set_weight(int i, int j, double w) {
    if (std::fabs(w) > cfg_.w_max)
      throw std::invalid_argument("crossbar: |weight| exceeds w_max at (" +
                                  std::to_string(i) + ", " + std::to_string(j) + ")");
    const std::size_t c = cell(i, j);
    place(plus_[c], w > 0.0 ? w / cfg_.w_max : 0.0, i, j);
    place(minus_[c], w < 0.0 ? -w / cfg_.w_max : 0.0, i, j);
    refresh_cell(i, j);
  }

  // Row-major inputs x cols.
  void program_weights(const std::vector<double>& w) {
    if (w.size() != cell_count())
      throw std::invalid_argument("crossbar: weight matrix shape mismatch");
    for (int i = 0; i < inputs_; ++i)
      for (int j = 0; j < cols_; ++j)
        set_weight(i, j, w[static_cast<std::size_t>(i) * cols_ + j]);
  }

  std::vector<double> logical_weights() const {
    std::vector<double> w(cell_count());
    for (int i = 0; i < inputs_; ++i)
      for (int j = 0; j < cols_; ++j) w[static_cast<std::size_t>(i) * cols_ + j] = weight(i, j);
    return w;
  }

  // --- in-place device programming (plasticity paths) -----------------------

  // Current pulse through one multibit device's programming path.
  template <class S = Synapse>
  std::enable_if_t<std::is_same_v<S, MultibitSynapse>, void> apply_pulse(
      int i, int j, bool plus_row, const Pulse& pulse, EnergyLedger& ledger) {
    auto& dev = (plus_row ? plus_ : minus_)[cell(i, j)];
    dev.program(pulse, ledger);
    refresh_cell(i, j);
  }

  // Stochastic write attempt on one binary device.
  template <class S = Synapse>
  std::enable_if_t<std::is_same_v<S, BinarySynapse>, bool> stochastic_flip(
      int i, int j, bool plus_row, const Pulse& pulse,
      const SwitchingCharacterization& curve, double p_max, RngStream& rng,
      EnergyLedger& ledger) {
    auto& dev = (plus_row ? plus_ : minus_)[cell(i, j)];
    const bool flipped =
        program_binary_stochastic(dev, pulse, curve, p_max, cfg_.write_path_r_ohm, rng, ledger);
    if (flipped) refresh_cell(i, j);
    return flipped;
  }

  // --- electrical read -------------------------------------------------------

  // Column loading factor of one tile (NonIdeal mode; what the digital
  // normalization would have to undo).
  double gamma(int tile, int j) const {
    return tile_gsum_[static_cast<std::size_t>(tile) * cols_ + j] / cfg_.g_load_S;
  }

  double max_gamma() const {
    double g = 0.0;
    for (double s : tile_gsum_) g = std::max(g, s / cfg_.g_load_S);
    return g;
  }

  // Column currents for one read cycle; `active[i]` marks logical inputs
  // driven this cycle. Pure (no accounting).
  std::vector<double> column_currents(const std::vector<std::uint8_t>& active) const {
    if (static_cast<int>(active.size()) != inputs_)
      throw std::invalid_argument("crossbar: active mask length mismatch");
    std::vector<double> out(static_cast<std::size_t>(cols_), 0.0);
    std::vector<double> partial(static_cast<std::size_t>(cols_), 0.0);

    const int n_tiles = tile_count();
    for (int t = 0; t < n_tiles; ++t) {
      const int i0 = t * cfg_.tile_rows;
      const int i1 = std::min(inputs_, i0 + cfg_.tile_rows);
      std::fill(partial.begin(), partial.end(), 0.0);
      for (int i = i0; i < i1; ++i) {
        if (!active[static_cast<std::size_t>(i)]) continue;
        const double* gp = &gp_bias_[cell(i, 0)];
        const double* gm = &gm_bias_[cell(i, 0)];
        for (int j = 0; j < cols_; ++j) partial[static_cast<std::size_t>(j)] += gp[j] - gm[j];
      }
      for (int j = 0; j < cols_; ++j) {
        double p = cfg_.read_bias_V * partial[static_cast<std::size_t>(j)];
        if (!cfg_.ideal) p /= 1.0 + gamma(t, j);
        out[static_cast<std::size_t>(j)] += p;
      }
    }
    return out;
  }

  // As above, charging the ledger: one read event per active synapse pair at
  // its physically computed conduction energy dV^2 (G+ + G-) t_read, plus the
  // digital partial-sum additions between tiles at the table cost.
  std::vector<double> column_currents(const std::vector<std::uint8_t>& active,
                                      const EnergyCosts& costs,
                                      EnergyLedger& ledger) const {
    auto out = column_currents(active);
    std::uint64_t n_active = 0;
    double read_gsum = 0.0;
    for (int i = 0; i < inputs_; ++i)
      if (active[static_cast<std::size_t>(i)]) {
        ++n_active;
        read_gsum += row_read_gsum_[static_cast<std::size_t>(i)];
      }
    ledger.charge_total(
        EnergyEvent::SynapseRead, n_active * static_cast<std::uint64_t>(cols_),
        cfg_.read_bias_V * cfg_.read_bias_V * read_gsum * cfg_.read_window_s);
    if (tile_count() > 1)
      ledger.charge_n(EnergyEvent::DigitalAdd,
                      static_cast<std::uint64_t>(tile_count() - 1) *
                          static_cast<std::uint64_t>(cols_),
                      costs.digital_add_J);
    return out;
  }

  // Conductance of one device at the nominal read bias (diagnostics/tests).
  double plus_conductance_at_bias(int i, int j) const { return gp_bias_[cell(i, j)]; }
  double minus_conductance_at_bias(int i, int j) const { return gm_bias_[cell(i, j)]; }

 private:
  std::size_t cell_count() const {
    return static_cast<std::size_t>(inputs_) * static_cast<std::size_t>(cols_);
  }
  std::size_t cell(int i, int j) const {
    if (i < 0 || i >= inputs_ || j < 0 || j >= cols_)
      throw std::out_of_range("crossbar: cell index out of range");
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) + j;
  }

  static void park(MultibitSynapse& s) { s.program_weight(0.0); }
  static void park(BinarySynapse& s) { s.parallel = false; }

  // Place a normalized [0,1] weight on one device. Binary devices accept only
  // the two end states.
  void place(MultibitSynapse& s, double u, int, int) { s.program_weight(u); }
  void place(BinarySynapse& s, double u, int i, int j) {
    if (std::fabs(u) > 1e-9 && std::fabs(u - 1.0) > 1e-9)
      throw std::invalid_argument("crossbar: binary device needs weight 0 or " +
                                  std::to_string(cfg_.w_max) + " at (" + std::to_string(i) +
                                  ", " + std::to_string(j) + ")");
    s.parallel = u > 0.5;
  }

  void refresh_cell(int i, int j) {
    const std::size_t c = cell(i, j);
    const int t = i / cfg_.tile_rows;
    const std::size_t tc = static_cast<std::size_t>(t) * cols_ + j;
    const double old_pair = gp_bias_[c] + gm_bias_[c];
    gp_bias_[c] = plus_[c].conductance(cfg_.read_bias_V);
    gm_bias_[c] = minus_[c].conductance(cfg_.read_bias_V);
    const double new_pair = gp_bias_[c] + gm_bias_[c];
    tile_gsum_[tc] += new_pair - old_pair;
    row_read_gsum_[static_cast<std::size_t>(i)] += new_pair - old_pair;
  }

  void rebuild_cache() {
    gp_bias_.assign(cell_count(), 0.0);
    gm_bias_.assign(cell_count(), 0.0);
    tile_gsum_.assign(static_cast<std::size_t>(tile_count()) * cols_, 0.0);
    row_read_gsum_.assign(static_cast<std::size_t>(inputs_), 0.0);
    for (int i = 0; i < inputs_; ++i)
      for (int j = 0; j < cols_; ++j) {
        const std::size_t c = cell(i, j);
        gp_bias_[c] = plus_[c].conductance(cfg_.read_bias_V);
        gm_bias_[c] = minus_[c].conductance(cfg_.read_bias_V);
        const double pair = gp_bias_[c] + gm_bias_[c];
        tile_gsum_[static_cast<std::size_t>(i / cfg_.tile_rows) * cols_ + j] += pair;
        row_read_gsum_[static_cast<std::size_t>(i)] += pair;
      }
  }

  int inputs_;
  int cols_;
  CrossbarConfig cfg_;
  std::vector<Synapse> plus_, minus_;
  // Conductances linearized at the read bias, plus running sums for the
  // loading factors and read-energy accounting.
  std::vector<double> gp_bias_, gm_bias_;
  std::vector<double> tile_gsum_;       // per (tile, col): sum of (G+ + G-)
  std::vector<double> row_read_gsum_;   // per input: sum over cols of (G+ + G-)
};

using MultibitCrossbar = Crossbar<MultibitSynapse>;
using BinaryCrossbar = Crossbar<BinarySynapse>;

}  // namespace spinsnn
