#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinsnn/crossbar.hpp"
#include "spinsnn/encoding.hpp"
#include "spinsnn/energy.hpp"
#include "spinsnn/neurons.hpp"
#include "spinsnn/rng.hpp"
#include "spinsnn/synapses.hpp"
#include "spinsnn/topology.hpp"
#include "spinsnn/weights.hpp"

// Feedforward spiking inference from externally trained weights. Each conv or
// fully connected layer is one multibit crossbar (signed weights as
// differential device pairs); every timestep the incoming spike plane drives
// patch reads through the array and a spiking unit per output location decides
// whether a spike continues downstream:
//
//  * integrate-fire units accumulate the (signed) column current on a wall
//    track with a hard floor at zero - over many timesteps the spike rate
//    approximates a rectified-linear response to the input rates;
//  * stochastic units fire with the probability the switching
//    characterization assigns to the (gain-scaled, compliance-clamped) column
//    current - no state carries between timesteps.
//
// Subsampling layers carry no weights: each window accumulates its mean input
// spike count and emits a spike per accumulated unit (remainder carried), so
// rates are preserved exactly while the data stays binary.

namespace spinsnn {

enum class InferenceNeuron { IntegrateFire, Stochastic };

struct InferenceConfig {
  InferenceNeuron neuron = InferenceNeuron::IntegrateFire;
  CrossbarConfig xbar;
  IfNeuronParams if_neuron;               // integrate-fire mode
  SwitchingCharacterization curve;        // stochastic mode
  double stochastic_drive_gain = 1.0;     // column current -> write amplitude
  EnergyCosts costs;

  void validate() const {
    if_neuron.validate();
    if (neuron == InferenceNeuron::Stochastic) {
      if (curve.currents_A.size() < 2)
        throw std::invalid_argument("inference: stochastic mode needs a switching curve");
      if (stochastic_drive_gain <= 0.0)
        throw std::invalid_argument("inference: drive gain must be > 0");
    }
  }
};

class FeedforwardNetwork {
 public:
  FeedforwardNetwork(const NetworkTopology& topo, const std::vector<WeightMatrix>& weights,
                     const InferenceConfig& cfg)
      : topo_(topo), cfg_(cfg) {
    cfg_.validate();
    shapes_ = topo.shapes();
    const auto expected = topo.weight_shapes();
    if (weights.size() != expected.size())
      throw std::invalid_argument("inference: topology " + topo.str() + " needs " +
                                  std::to_string(expected.size()) + " weight matrices, got " +
                                  std::to_string(weights.size()));
    for (std::size_t k = 0; k < expected.size(); ++k) {
      const auto& e = expected[k];
      const auto& w = weights[k];
      if (w.rows != e.rows || w.cols != e.cols)
        throw std::invalid_argument(
            "inference: layer " + std::to_string(e.layer_index + 1) + " of " + topo.str() +
            " expects a " + std::to_string(e.rows) + " x " + std::to_string(e.cols) +
            " weight matrix, got " + std::to_string(w.rows) + " x " + std::to_string(w.cols));
      arrays_.emplace_back(e.rows, e.cols, MultibitSynapse{}, cfg_.xbar);
      arrays_.back().program_weights(w.w);
    }
    reset();
  }

  const NetworkTopology& topology() const { return topo_; }
  int output_units() const { return shapes_.back().maps; }

  void reset() {
    if_state_.clear();
    subsample_acc_.clear();
    outputs_.clear();
    LayerShape in{1, topo_.input_h(), topo_.input_w()};
    for (std::size_t i = 0; i < topo_.layers().size(); ++i) {
      const LayerShape s = shapes_[i];
      outputs_.emplace_back(static_cast<std::size_t>(s.size()), 0);
      if (topo_.layers()[i].kind == TopologyLayer::Kind::Subsample)
        subsample_acc_.emplace_back(static_cast<std::size_t>(s.size()), 0.0);
      else
        subsample_acc_.emplace_back();
      if (topo_.layers()[i].kind != TopologyLayer::Kind::Subsample)
        if_state_.emplace_back(static_cast<std::size_t>(s.size()), IfNeuronState{});
      else
        if_state_.emplace_back();
      in = s;
    }
  }

  // Advances the whole pipeline one timestep. `input_bits` is the input plane
  // (input_h x input_w, row-major); the return value is the output layer's
  // spike vector for this step. RNG is consumed only in stochastic mode, in a
  // fixed layer-major, unit-minor order.
  const std::vector<std::uint8_t>& step(const std::vector<std::uint8_t>& input_bits,
                                        RngStream& rng, EnergyLedger& ledger) {
    const LayerShape in0{1, topo_.input_h(), topo_.input_w()};
    if (static_cast<int>(input_bits.size()) != in0.size())
      throw std::invalid_argument("inference: input plane has " +
                                  std::to_string(input_bits.size()) + " bits, topology " +
                                  topo_.str() + " expects " + std::to_string(in0.size()));
    const std::vector<std::uint8_t>* prev = &input_bits;
    LayerShape prev_shape = in0;
    std::size_t array_idx = 0;
    for (std::size_t i = 0; i < topo_.layers().size(); ++i) {
      const TopologyLayer& l = topo_.layers()[i];
      const LayerShape s = shapes_[i];
      std::vector<std::uint8_t>& out = outputs_[i];
      switch (l.kind) {
        case TopologyLayer::Kind::Conv:
          step_conv(l, prev_shape, *prev, s, arrays_[array_idx], if_state_[i], out, rng,
                    ledger);
          ++array_idx;
          break;
        case TopologyLayer::Kind::Subsample:
          step_subsample(l, prev_shape, *prev, s, subsample_acc_[i], out);
          break;
        case TopologyLayer::Kind::Output:
          step_output(prev_shape, *prev, s, arrays_[array_idx], if_state_[i], out, rng,
                      ledger);
          ++array_idx;
          break;
      }
      prev = &out;
      prev_shape = s;
    }
    return outputs_.back();
  }

 private:
  bool unit_decision(double i_col_A, IfNeuronState& st, RngStream& rng,
                     EnergyLedger& ledger) {
    if (cfg_.neuron == InferenceNeuron::IntegrateFire)
      return if_neuron_step(cfg_.if_neuron, st, i_col_A, ledger, cfg_.costs);
    StochasticNeuronParams p{cfg_.curve};
    const double drive = std::clamp(cfg_.stochastic_drive_gain * i_col_A,
                                    cfg_.curve.currents_A.front(),
                                    cfg_.curve.currents_A.back());
    return stochastic_neuron_step(p, drive, rng, ledger, cfg_.costs);
  }

  void step_conv(const TopologyLayer& l, const LayerShape& in,
                 const std::vector<std::uint8_t>& bits, const LayerShape& s,
                 const MultibitCrossbar& xbar, std::vector<IfNeuronState>& st,
                 std::vector<std::uint8_t>& out, RngStream& rng, EnergyLedger& ledger) {
    const int k = l.window;
    std::vector<std::uint8_t> active(static_cast<std::size_t>(in.maps) * k * k);
    for (int y = 0; y < s.h; ++y)
      for (int x = 0; x < s.w; ++x) {
        for (int m = 0; m < in.maps; ++m)
          for (int dy = 0; dy < k; ++dy)
            for (int dx = 0; dx < k; ++dx)
              active[static_cast<std::size_t>((m * k + dy) * k + dx)] =
                  bits[static_cast<std::size_t>((m * in.h + y + dy) * in.w + x + dx)];
        const auto i_col = xbar.column_currents(active, cfg_.costs, ledger);
        for (int m = 0; m < s.maps; ++m) {
          const std::size_t u = static_cast<std::size_t>((m * s.h + y) * s.w + x);
          out[u] = unit_decision(i_col[static_cast<std::size_t>(m)], st[u], rng, ledger);
        }
      }
  }

  void step_subsample(const TopologyLayer& l, const LayerShape& in,
                      const std::vector<std::uint8_t>& bits, const LayerShape& s,
                      std::vector<double>& acc, std::vector<std::uint8_t>& out) {
    const int w = l.window;
    const double frac = 1.0 / (w * w);
    for (int m = 0; m < s.maps; ++m)
      for (int y = 0; y < s.h; ++y)
        for (int x = 0; x < s.w; ++x) {
          int count = 0;
          for (int dy = 0; dy < w; ++dy)
            for (int dx = 0; dx < w; ++dx)
              count += bits[static_cast<std::size_t>((m * in.h + y * w + dy) * in.w +
                                                     x * w + dx)];
          const std::size_t u = static_cast<std::size_t>((m * s.h + y) * s.w + x);
          acc[u] += count * frac;
          if (acc[u] >= 1.0) {
            acc[u] -= 1.0;
            out[u] = 1;
          } else {
            out[u] = 0;
          }
        }
  }

  void step_output(const LayerShape& in, const std::vector<std::uint8_t>& bits,
                   const LayerShape& s, const MultibitCrossbar& xbar,
                   std::vector<IfNeuronState>& st, std::vector<std::uint8_t>& out,
                   RngStream& rng, EnergyLedger& ledger) {
    (void)in;
    const auto i_col = xbar.column_currents(bits, cfg_.costs, ledger);
    for (int j = 0; j < s.maps; ++j)
      out[static_cast<std::size_t>(j)] =
          unit_decision(i_col[static_cast<std::size_t>(j)], st[static_cast<std::size_t>(j)],
                        rng, ledger);
  }

  NetworkTopology topo_;
  InferenceConfig cfg_;
  std::vector<LayerShape> shapes_;
  std::vector<MultibitCrossbar> arrays_;
  std::vector<std::vector<IfNeuronState>> if_state_;
  std::vector<std::vector<double>> subsample_acc_;
  std::vector<std::vector<std::uint8_t>> outputs_;
};

struct InferenceResult {
  std::vector<std::uint64_t> output_counts;  // spikes per output unit
  int predicted = -1;                        // argmax; lowest index on ties
};

// Runs a whole encoded train through the network and scores by output spike
// counts.
inline InferenceResult infer_feedforward(FeedforwardNetwork& net, const SpikeTrain& train,
                                         RngStream& rng, EnergyLedger& ledger) {
  const int n_in = net.topology().input_h() * net.topology().input_w();
  if (train.inputs != n_in)
    throw std::invalid_argument("inference: spike train carries " +
                                std::to_string(train.inputs) + " inputs, topology " +
                                net.topology().str() + " expects " + std::to_string(n_in));
  net.reset();
  InferenceResult out;
  out.output_counts.assign(static_cast<std::size_t>(net.output_units()), 0);
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n_in));
  for (int t = 0; t < train.timesteps; ++t) {
    const std::uint8_t* row = train.row(t);
    std::copy(row, row + n_in, bits.begin());
    const auto& spikes = net.step(bits, rng, ledger);
    for (std::size_t j = 0; j < spikes.size(); ++j) out.output_counts[j] += spikes[j];
  }
  std::uint64_t best = 0;
  for (std::size_t j = 0; j < out.output_counts.size(); ++j)
    if (out.output_counts[j] > best) {
      best = out.output_counts[j];
      out.predicted = static_cast<int>(j);
    }
  return out;
}

// Reference rectified-linear forward pass over mean input rates: the
// rate-domain twin of the spiking network above, used to cross-check the
// integrate-fire path. Returns the output-layer activations (pre-argmax).
inline std::vector<double> relu_forward(const NetworkTopology& topo,
                                        const std::vector<WeightMatrix>& weights,
                                        const std::vector<double>& input_rates) {
  const auto shapes = topo.shapes();
  const auto expected = topo.weight_shapes();
  if (weights.size() != expected.size())
    throw std::invalid_argument("relu forward: weight count mismatch");
  LayerShape in{1, topo.input_h(), topo.input_w()};
  if (static_cast<int>(input_rates.size()) != in.size())
    throw std::invalid_argument("relu forward: input size mismatch");
  std::vector<double> prev = input_rates;
  std::size_t array_idx = 0;
  for (std::size_t i = 0; i < topo.layers().size(); ++i) {
    const TopologyLayer& l = topo.layers()[i];
    const LayerShape s = shapes[i];
    std::vector<double> out(static_cast<std::size_t>(s.size()), 0.0);
    switch (l.kind) {
      case TopologyLayer::Kind::Conv: {
        const int k = l.window;
        const WeightMatrix& w = weights[array_idx++];
        for (int y = 0; y < s.h; ++y)
          for (int x = 0; x < s.w; ++x)
            for (int m = 0; m < s.maps; ++m) {
              double a = 0.0;
              for (int mi = 0; mi < in.maps; ++mi)
                for (int dy = 0; dy < k; ++dy)
                  for (int dx = 0; dx < k; ++dx)
                    a += w.at((mi * k + dy) * k + dx, m) *
                         prev[static_cast<std::size_t>((mi * in.h + y + dy) * in.w + x + dx)];
              out[static_cast<std::size_t>((m * s.h + y) * s.w + x)] = std::max(0.0, a);
            }
        break;
      }
      case TopologyLayer::Kind::Subsample: {
        const int sw = l.window;
        for (int m = 0; m < s.maps; ++m)
          for (int y = 0; y < s.h; ++y)
            for (int x = 0; x < s.w; ++x) {
              double a = 0.0;
              for (int dy = 0; dy < sw; ++dy)
                for (int dx = 0; dx < sw; ++dx)
                  a += prev[static_cast<std::size_t>((m * in.h + y * sw + dy) * in.w +
                                                     x * sw + dx)];
              out[static_cast<std::size_t>((m * s.h + y) * s.w + x)] = a / (sw * sw);
            }
        break;
      }
      case TopologyLayer::Kind::Output: {
        const WeightMatrix& w = weights[array_idx++];
        for (int j = 0; j < s.maps; ++j) {
          double a = 0.0;
          for (int i2 = 0; i2 < w.rows; ++i2) a += w.at(i2, j) * prev[static_cast<std::size_t>(i2)];
          out[static_cast<std::size_t>(j)] = std::max(0.0, a);
        }
        break;
      }
    }
    prev = std::move(out);
    in = s;
  }
  return prev;
}

}  // namespace spinsnn
