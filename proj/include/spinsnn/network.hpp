#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinsnn/crossbar.hpp"
#include "spinsnn/dataset.hpp"
#include "spinsnn/encoding.hpp"
#include "spinsnn/energy.hpp"
#include "spinsnn/idx.hpp"
#include "spinsnn/neurons.hpp"
#include "spinsnn/plasticity.hpp"
#include "spinsnn/rng.hpp"
#include "spinsnn/synapses.hpp"
#include "spinsnn/weights.hpp"

// Single-layer unsupervised learning network: every input pixel drives every
// excitatory neuron through one crossbar column; the column current (scaled by
// a driver gain and reduced by a per-neuron adaptive threshold) is the write
// amplitude of a stochastic neuron. Lateral inhibition is winner-take-all with
// two strengths:
//
//  - image_lock = true: the first neuron to fire (strongest drive on ties)
//    locks the presentation and clamps every other neuron's drive to the
//    bottom of the write range for its remainder, so exactly one neuron
//    accumulates post spikes - and therefore learning - per image.
//  - image_lock = false: the competition is re-run every timestep; the
//    strongest firing neuron takes that step's post and the rest are merely
//    outvoted, so a handful of neurons share each image in drive order.
//
// In both regimes the adaptive thresholds rotate the winner role across
// similar images, which is what spreads the classes over the neuron pool.
//
// After each image the pre/post spike times are compiled into signed
// programming pulses applied to the winner's column.
//
// Everything is a pure function of (image order, seed, config): encode,
// neuron-decision, and programming randomness come from per-image substreams,
// and neurons are evaluated in ascending index order, so results do not
// depend on execution platform or thread count.

namespace spinsnn {

struct UnsupervisedParams {
  int n_neurons = 100;
  int timesteps = 50;
  double dt_s = 5e-6;          // timestep, also the spike-time unit for pairing
  double max_rate_hz = 1e5;    // full-intensity rate; peak p = max_rate * dt
  double drive_gain = 8.0;     // column current -> neuron write amplitude
  int epochs = 1;
  double w_init_lo = 0.1;      // uniform initial logical weights (analog mode);
  double w_init_hi = 0.4;      // binary mode seeds ON with the range midpoint
  double divergence_share = 0.5;  // diagnostics if one neuron exceeds this share
  bool image_lock = true;      // true: one winner per image; false: per timestep

  StdpParams stdp;             // mode selects the synapse technology
  HomeostasisParams homeostasis;  // threshold in write-amplitude units [A]
  CrossbarConfig xbar;
  SwitchingCharacterization curve;  // neuron activation + stochastic write curve
  EnergyCosts costs;

  void validate() const {
    if (n_neurons < 1) throw std::invalid_argument("network: need >= 1 neuron");
    if (timesteps < 1) throw std::invalid_argument("network: need >= 1 timestep");
    if (dt_s <= 0.0) throw std::invalid_argument("network: dt must be > 0");
    if (max_rate_hz <= 0.0) throw std::invalid_argument("network: max_rate must be > 0");
    if (drive_gain <= 0.0) throw std::invalid_argument("network: drive gain must be > 0");
    if (epochs < 0) throw std::invalid_argument("network: epochs must be >= 0");
    if (w_init_lo < 0.0 || w_init_hi > 1.0 || w_init_lo > w_init_hi)
      throw std::invalid_argument("network: initial weight range must be within [0, 1]");
    if (divergence_share <= 0.0 || divergence_share > 1.0)
      throw std::invalid_argument("network: divergence share must be in (0, 1]");
    stdp.validate();
    homeostasis.validate();
    if (curve.currents_A.size() < 2)
      throw std::invalid_argument("network: needs a characterized switching curve");
  }
};

struct TrainResult {
  WeightMatrix weights;               // logical weights, inputs x neurons
  std::vector<double> thresholds;     // final adaptive thresholds [A]
  std::vector<std::uint64_t> spike_counts;  // post spikes per neuron, all epochs
  std::uint64_t programming_events = 0;
  EnergyLedger ledger;
  std::vector<std::string> diagnostics;
};

namespace detail {

// One image through the crossbar: encode, drive the neuron bank per timestep
// with winner-take-all inhibition, collect pre/post spike times, then compile
// and apply the programming schedule column by column. Shared by the
// single-array and the two-array (significance-split) trainers, which differ
// only in how many crossbars see the read cycle and the programming events.
struct ImageTally {
  std::vector<std::vector<double>> pre_t;   // per input
  std::vector<std::vector<double>> post_t;  // per neuron: credited posts
  std::vector<std::uint64_t> fired;         // per neuron: raw device fires
};

template <class ReadFn>
inline ImageTally run_image_dynamics(const UnsupervisedParams& p,
                                     const std::vector<double>& intensity,
                                     std::vector<double>& theta, RngStream& enc_rng,
                                     RngStream& neuron_rng, ReadFn&& column_read,
                                     EnergyLedger& ledger,
                                     std::vector<std::uint64_t>& spike_counts) {
  const int inputs = static_cast<int>(intensity.size());
  const SpikeTrain train =
      poisson_encode(intensity, p.timesteps, p.max_rate_hz, p.dt_s, enc_rng);

  StochasticNeuronParams neuron{p.curve};
  const double amp_lo = p.curve.currents_A.front();
  const double amp_hi = p.curve.currents_A.back();

  ImageTally tally;
  tally.pre_t.resize(static_cast<std::size_t>(inputs));
  tally.post_t.resize(static_cast<std::size_t>(p.n_neurons));
  tally.fired.assign(static_cast<std::size_t>(p.n_neurons), 0);

  std::vector<std::uint8_t> active(static_cast<std::size_t>(inputs));
  int image_winner = -1;  // inhibition lock; -1 until the first spike
  for (int t = 0; t < p.timesteps; ++t) {
    const double now = t * p.dt_s;
    const std::uint8_t* row = train.row(t);
    for (int i = 0; i < inputs; ++i) {
      active[static_cast<std::size_t>(i)] = row[i];
      if (row[i]) tally.pre_t[static_cast<std::size_t>(i)].push_back(now);
    }
    const std::vector<double> i_col = column_read(active);

    // Every neuron runs its write/read cycle each step (the cycle energy is
    // spent whether or not the drive is useful). Drives are clamped to the
    // characterized write range - the driver cannot produce amplitudes
    // outside its compliance window - and neurons inhibited by the image
    // winner are held at the bottom of that range.
    int step_winner = -1;
    double step_winner_drive = 0.0;
    for (int j = 0; j < p.n_neurons; ++j) {
      const bool inhibited = p.image_lock && image_winner >= 0 && j != image_winner;
      const double drive =
          inhibited ? amp_lo
                    : std::clamp(p.drive_gain * i_col[static_cast<std::size_t>(j)] -
                                     theta[static_cast<std::size_t>(j)],
                                 amp_lo, amp_hi);
      const bool fired = stochastic_neuron_step(neuron, drive, neuron_rng, ledger, p.costs);
      if (fired) ++tally.fired[static_cast<std::size_t>(j)];
      if (fired && !inhibited && (step_winner < 0 || drive > step_winner_drive)) {
        step_winner = j;
        step_winner_drive = drive;
      }
    }
    if (p.image_lock && image_winner < 0) image_winner = step_winner;
    const int post = p.image_lock
                         ? (step_winner >= 0 && step_winner == image_winner ? image_winner
                                                                            : -1)
                         : step_winner;
    for (int j = 0; j < p.n_neurons; ++j)
      theta[static_cast<std::size_t>(j)] =
          homeostasis_update(p.homeostasis, theta[static_cast<std::size_t>(j)],
                             j == post, p.dt_s);
    if (post >= 0) {
      tally.post_t[static_cast<std::size_t>(post)].push_back(now);
      ++spike_counts[static_cast<std::size_t>(post)];
    }
  }
  return tally;
}

// Applies one pairing schedule to one crossbar column. Analog arrays take the
// signed pulse directly; binary arrays attempt a stochastic flip whose
// probability the characterization curve assigns to the pulse amplitude.
template <class Xbar>
inline std::uint64_t apply_schedule(Xbar& xbar, const UnsupervisedParams& p,
                                    const StdpParams& rule, int input, int neuron,
                                    const std::vector<StdpEvent>& events,
                                    RngStream& prog_rng, EnergyLedger& ledger) {
  for (const StdpEvent& ev : events) {
    if constexpr (std::is_same_v<Xbar, MultibitCrossbar>) {
      xbar.apply_pulse(input, neuron, /*plus_row=*/true, ev.pulse, ledger);
    } else {
      xbar.stochastic_flip(input, neuron, /*plus_row=*/true, ev.pulse, p.curve,
                           rule.p_max, prog_rng, ledger);
    }
  }
  return events.size();
}

inline void seed_initial_weights(MultibitCrossbar& xbar, const UnsupervisedParams& p,
                                 RngStream& rng) {
  for (int i = 0; i < xbar.inputs(); ++i)
    for (int j = 0; j < xbar.cols(); ++j)
      xbar.set_weight(i, j,
                      (p.w_init_lo + (p.w_init_hi - p.w_init_lo) * rng.uniform()) *
                          xbar.config().w_max);
}

inline void seed_initial_weights(BinaryCrossbar& xbar, const UnsupervisedParams& p,
                                 RngStream& rng) {
  const double p_on = 0.5 * (p.w_init_lo + p.w_init_hi);
  for (int i = 0; i < xbar.inputs(); ++i)
    for (int j = 0; j < xbar.cols(); ++j)
      xbar.set_weight(i, j, rng.bernoulli(p_on) ? xbar.config().w_max : 0.0);
}

inline MultibitCrossbar make_crossbar(const UnsupervisedParams& p, int inputs,
                                      const MultibitSynapse& proto) {
  return MultibitCrossbar(inputs, p.n_neurons, proto, p.xbar);
}

inline void check_dataset(const IdxImages& images) {
  if (images.count < 1) throw std::invalid_argument("network: empty training set");
}

inline void divergence_diagnostics(const std::vector<std::uint64_t>& epoch_counts,
                                   double share_cap, int epoch,
                                   std::vector<std::string>& diagnostics) {
  std::uint64_t total = 0;
  for (std::uint64_t c : epoch_counts) total += c;
  if (total == 0) {
    diagnostics.push_back("epoch " + std::to_string(epoch) +
                          ": no neuron fired; drive gain or thresholds are off scale");
    return;
  }
  for (std::size_t j = 0; j < epoch_counts.size(); ++j) {
    const double share = static_cast<double>(epoch_counts[j]) / static_cast<double>(total);
    if (share > share_cap)
      diagnostics.push_back("epoch " + std::to_string(epoch) + ": neuron " +
                            std::to_string(j) + " captured " +
                            std::to_string(share) + " of all spikes (cap " +
                            std::to_string(share_cap) + "); training diverged");
  }
}

template <class Xbar>
inline TrainResult train_single_array(const IdxImages& images, const UnsupervisedParams& p,
                                      const Xbar& empty, const RngStream& rng) {
  p.validate();
  check_dataset(images);
  const int inputs = images.rows * images.cols;

  Xbar xbar = empty;
  RngStream init_rng = rng.substream("init");
  seed_initial_weights(xbar, p, init_rng);

  TrainResult out;
  out.thresholds.assign(static_cast<std::size_t>(p.n_neurons), p.homeostasis.theta_floor);
  out.spike_counts.assign(static_cast<std::size_t>(p.n_neurons), 0);

  for (int epoch = 0; epoch < p.epochs; ++epoch) {
    std::vector<std::uint64_t> epoch_counts(static_cast<std::size_t>(p.n_neurons), 0);
    for (int n = 0; n < images.count; ++n) {
      const std::uint64_t image_index =
          static_cast<std::uint64_t>(epoch) * images.count + static_cast<std::uint64_t>(n);
      RngStream img_rng = rng.substream(image_index);
      RngStream enc_rng = img_rng.substream("encode");
      RngStream neuron_rng = img_rng.substream("neurons");
      RngStream prog_rng = img_rng.substream("prog");

      const ImageTally tally = run_image_dynamics(
          p, image_intensity(images, n), out.thresholds, enc_rng, neuron_rng,
          [&](const std::vector<std::uint8_t>& active) {
            return xbar.column_currents(active, p.costs, out.ledger);
          },
          out.ledger, epoch_counts);

      for (int j = 0; j < p.n_neurons; ++j) {
        if (tally.post_t[static_cast<std::size_t>(j)].empty()) continue;
        for (int i = 0; i < inputs; ++i) {
          const auto events = stdp_event_schedule(tally.pre_t[static_cast<std::size_t>(i)],
                                                  tally.post_t[static_cast<std::size_t>(j)],
                                                  p.stdp);
          out.programming_events +=
              apply_schedule(xbar, p, p.stdp, i, j, events, prog_rng, out.ledger);
        }
      }
    }
    for (int j = 0; j < p.n_neurons; ++j)
      out.spike_counts[static_cast<std::size_t>(j)] += epoch_counts[static_cast<std::size_t>(j)];
    divergence_diagnostics(epoch_counts, p.divergence_share, epoch, out.diagnostics);
  }

  const auto w = xbar.logical_weights();
  out.weights = WeightMatrix::zeros(inputs, p.n_neurons);
  out.weights.w = w;
  return out;
}

}  // namespace detail

// Fig-style single-layer training loop: encode -> crossbar read cycles ->
// winner-take-all spikes -> pairing schedule -> synapse programming ->
// homeostasis. Dispatches the crossbar technology on the plasticity mode.
inline TrainResult train_unsupervised(const IdxImages& images, const UnsupervisedParams& p,
                                      const RngStream& rng) {
  p.validate();
  detail::check_dataset(images);
  const int inputs = images.rows * images.cols;
  if (p.stdp.mode == StdpMode::Analog) {
    MultibitCrossbar xbar(inputs, p.n_neurons, MultibitSynapse{}, p.xbar);
    return detail::train_single_array(images, p, xbar, rng);
  }
  BinaryCrossbar xbar(inputs, p.n_neurons, BinarySynapse{}, p.xbar);
  return detail::train_single_array(images, p, xbar, rng);
}

// --- evaluation ------------------------------------------------------------------

struct ClassAssignment {
  std::vector<int> neuron_class;              // -1 = unused (silent on labeled pass)
  std::vector<std::vector<std::uint64_t>> response;  // neuron x class spike tally
};

namespace detail {

// Frozen-weight response pass: raw per-neuron fire counts for one image, same
// dynamics as training but no programming and no threshold adaptation. The
// readout sees every device fire, not just the competition-credited posts.
template <class Xbar>
inline std::vector<std::uint64_t> response_counts(const Xbar& xbar,
                                                  const UnsupervisedParams& p,
                                                  const std::vector<double>& thresholds,
                                                  const std::vector<double>& intensity,
                                                  RngStream& img_rng) {
  RngStream enc_rng = img_rng.substream("encode");
  RngStream neuron_rng = img_rng.substream("neurons");
  std::vector<double> theta = thresholds;  // frozen: no homeostasis params applied
  HomeostasisParams frozen;                // zero increment, zero decay
  UnsupervisedParams q = p;
  q.homeostasis = frozen;
  EnergyLedger scratch;
  std::vector<std::uint64_t> posts(static_cast<std::size_t>(p.n_neurons), 0);
  const ImageTally tally =
      run_image_dynamics(q, intensity, theta, enc_rng, neuron_rng,
                         [&](const std::vector<std::uint8_t>& active) {
                           return xbar.column_currents(active);
                         },
                         scratch, posts);
  return tally.fired;
}

template <class Xbar>
inline Xbar restore_crossbar(const WeightMatrix& weights, const UnsupervisedParams& p) {
  if (weights.rows < 1 || weights.cols != p.n_neurons)
    throw std::invalid_argument("network: weight matrix is " + std::to_string(weights.rows) +
                                " x " + std::to_string(weights.cols) + ", expected inputs x " +
                                std::to_string(p.n_neurons));
  Xbar xbar(weights.rows, weights.cols,
            typename std::conditional<std::is_same_v<Xbar, MultibitCrossbar>,
                                      MultibitSynapse, BinarySynapse>::type{},
            p.xbar);
  xbar.program_weights(weights.w);
  return xbar;
}

}  // namespace detail

// Labels each neuron with the class it responds to most on a labeled pass,
// then scores the test set by summing spike counts over same-class neurons.
// Neurons silent on the labeled pass are marked unused (-1) and excluded.
template <class Xbar>
inline ClassAssignment assign_classes(const Xbar& xbar, const UnsupervisedParams& p,
                                      const std::vector<double>& thresholds,
                                      const IdxImages& labeled, const IdxLabels& labels,
                                      int n_classes, const RngStream& rng) {
  if (static_cast<std::size_t>(labeled.count) != labels.labels.size())
    throw std::invalid_argument("network: labeled image/label count mismatch");
  ClassAssignment out;
  out.response.assign(static_cast<std::size_t>(p.n_neurons),
                      std::vector<std::uint64_t>(static_cast<std::size_t>(n_classes), 0));
  for (int n = 0; n < labeled.count; ++n) {
    const int cls = labels.labels[static_cast<std::size_t>(n)];
    if (cls < 0 || cls >= n_classes)
      throw std::invalid_argument("network: label " + std::to_string(cls) +
                                  " outside the configured " + std::to_string(n_classes) +
                                  " classes");
    RngStream img_rng = rng.substream("assign").substream(static_cast<std::uint64_t>(n));
    const auto counts =
        detail::response_counts(xbar, p, thresholds, image_intensity(labeled, n), img_rng);
    for (int j = 0; j < p.n_neurons; ++j)
      out.response[static_cast<std::size_t>(j)][static_cast<std::size_t>(cls)] +=
          counts[static_cast<std::size_t>(j)];
  }
  out.neuron_class.assign(static_cast<std::size_t>(p.n_neurons), -1);
  for (int j = 0; j < p.n_neurons; ++j) {
    const auto& r = out.response[static_cast<std::size_t>(j)];
    std::uint64_t best = 0;
    int best_cls = -1;
    for (int c = 0; c < n_classes; ++c)
      if (r[static_cast<std::size_t>(c)] > best) {
        best = r[static_cast<std::size_t>(c)];
        best_cls = c;
      }
    out.neuron_class[static_cast<std::size_t>(j)] = best_cls;  // stays -1 if silent
  }
  return out;
}

struct ClassificationResult {
  double accuracy = 0.0;
  std::vector<int> predicted;  // per test image; -1 if no class spiked
  ClassAssignment assignment;
};

// Full evaluation harness: weight matrix -> crossbar -> neuron labeling on the
// labeled subset -> per-image class vote on the test set.
inline ClassificationResult assign_and_classify(const WeightMatrix& weights,
                                                const std::vector<double>& thresholds,
                                                const UnsupervisedParams& p,
                                                const IdxImages& labeled,
                                                const IdxLabels& labeled_labels,
                                                const IdxImages& test,
                                                const IdxLabels& test_labels,
                                                int n_classes, const RngStream& rng) {
  p.validate();
  if (static_cast<std::size_t>(test.count) != test_labels.labels.size())
    throw std::invalid_argument("network: test image/label count mismatch");

  const auto run = [&](const auto& xbar) {
    ClassificationResult out;
    out.assignment =
        assign_classes(xbar, p, thresholds, labeled, labeled_labels, n_classes, rng);
    out.predicted.assign(static_cast<std::size_t>(test.count), -1);
    int correct = 0;
    for (int n = 0; n < test.count; ++n) {
      RngStream img_rng = rng.substream("test").substream(static_cast<std::uint64_t>(n));
      const auto counts =
          detail::response_counts(xbar, p, thresholds, image_intensity(test, n), img_rng);
      std::vector<std::uint64_t> votes(static_cast<std::size_t>(n_classes), 0);
      for (int j = 0; j < p.n_neurons; ++j) {
        const int cls = out.assignment.neuron_class[static_cast<std::size_t>(j)];
        if (cls >= 0) votes[static_cast<std::size_t>(cls)] += counts[static_cast<std::size_t>(j)];
      }
      std::uint64_t best = 0;
      int pred = -1;
      for (int c = 0; c < n_classes; ++c)
        if (votes[static_cast<std::size_t>(c)] > best) {
          best = votes[static_cast<std::size_t>(c)];
          pred = c;
        }
      out.predicted[static_cast<std::size_t>(n)] = pred;
      if (pred == test_labels.labels[static_cast<std::size_t>(n)]) ++correct;
    }
    out.accuracy = static_cast<double>(correct) / static_cast<double>(test.count);
    return out;
  };

  if (p.stdp.mode == StdpMode::Analog)
    return run(detail::restore_crossbar<MultibitCrossbar>(weights, p));
  return run(detail::restore_crossbar<BinaryCrossbar>(weights, p));
}

// --- significance-split (two-array) training ---------------------------------------

// Two crossbars share the input rows and the neuron bank: a long-term array
// with tighter pairing windows learns only strongly-coincident structure,
// while a short-term array with wide windows tracks the bulk correlations.
// Rows of the long-term array are read at a bias at least as high as the
// short-term array's, which is what gives its bits more say per unit
// conductance. Neuron drive is the sum of the two column currents.
struct LtStConfig {
  StdpParams lt;
  StdpParams st;
  double lt_read_bias_V = 0.05;
  double st_read_bias_V = 0.05;

  void validate() const {
    lt.validate();
    st.validate();
    if (lt.mode != st.mode)
      throw std::invalid_argument("lt/st: both arrays must use one synapse technology");
    if (lt.tau_plus_s > st.tau_plus_s || lt.tau_minus_s > st.tau_minus_s)
      throw std::invalid_argument(
          "lt/st: the long-term array needs pairing windows no wider than the short-term's");
    if (lt_read_bias_V < st_read_bias_V)
      throw std::invalid_argument(
          "lt/st: the long-term array is the significant one; read it at >= the "
          "short-term bias");
    if (lt_read_bias_V <= 0.0 || st_read_bias_V <= 0.0)
      throw std::invalid_argument("lt/st: read biases must be > 0");
  }
};

struct LtStResult {
  WeightMatrix lt_weights;
  WeightMatrix st_weights;
  std::vector<double> thresholds;
  std::vector<std::uint64_t> spike_counts;
  std::uint64_t lt_programming_events = 0;
  std::uint64_t st_programming_events = 0;
  EnergyLedger lt_ledger;   // long-term array reads + writes
  EnergyLedger st_ledger;   // short-term array reads + writes
  EnergyLedger ledger;      // everything else (neurons, digital)
  std::vector<std::string> diagnostics;

  EnergyLedger total_ledger() const {
    EnergyLedger all = ledger;
    all.merge(lt_ledger);
    all.merge(st_ledger);
    return all;
  }
};

namespace detail {

template <class Xbar, class Synapse>
inline LtStResult train_two_arrays(const IdxImages& images, const UnsupervisedParams& p,
                                   const LtStConfig& cfg, const RngStream& rng) {
  const int inputs = images.rows * images.cols;

  CrossbarConfig lt_cfg = p.xbar;
  lt_cfg.read_bias_V = cfg.lt_read_bias_V;
  CrossbarConfig st_cfg = p.xbar;
  st_cfg.read_bias_V = cfg.st_read_bias_V;
  Xbar lt(inputs, p.n_neurons, Synapse{}, lt_cfg);
  Xbar st(inputs, p.n_neurons, Synapse{}, st_cfg);

  // Both arrays start from the same state, drawn once: the split is an
  // architecture choice, not an initialization difference.
  {
    RngStream init_rng = rng.substream("init");
    seed_initial_weights(lt, p, init_rng);
  }
  {
    RngStream init_rng = rng.substream("init");
    seed_initial_weights(st, p, init_rng);
  }

  LtStResult out;
  out.thresholds.assign(static_cast<std::size_t>(p.n_neurons), p.homeostasis.theta_floor);
  out.spike_counts.assign(static_cast<std::size_t>(p.n_neurons), 0);

  for (int epoch = 0; epoch < p.epochs; ++epoch) {
    std::vector<std::uint64_t> epoch_counts(static_cast<std::size_t>(p.n_neurons), 0);
    for (int n = 0; n < images.count; ++n) {
      const std::uint64_t image_index =
          static_cast<std::uint64_t>(epoch) * images.count + static_cast<std::uint64_t>(n);
      RngStream img_rng = rng.substream(image_index);
      RngStream enc_rng = img_rng.substream("encode");
      RngStream neuron_rng = img_rng.substream("neurons");
      RngStream prog_rng = img_rng.substream("prog");

      const ImageTally tally = run_image_dynamics(
          p, image_intensity(images, n), out.thresholds, enc_rng, neuron_rng,
          [&](const std::vector<std::uint8_t>& active) {
            auto i_lt = lt.column_currents(active, p.costs, out.lt_ledger);
            const auto i_st = st.column_currents(active, p.costs, out.st_ledger);
            for (std::size_t j = 0; j < i_lt.size(); ++j) i_lt[j] += i_st[j];
            // Merging the two arrays costs one more addition per column.
            out.ledger.charge_n(EnergyEvent::DigitalAdd, i_lt.size(), p.costs.digital_add_J);
            return i_lt;
          },
          out.ledger, epoch_counts);

      for (int j = 0; j < p.n_neurons; ++j) {
        if (tally.post_t[static_cast<std::size_t>(j)].empty()) continue;
        for (int i = 0; i < inputs; ++i) {
          const auto& pre = tally.pre_t[static_cast<std::size_t>(i)];
          const auto& post = tally.post_t[static_cast<std::size_t>(j)];
          out.lt_programming_events += apply_schedule(
              lt, p, cfg.lt, i, j, stdp_event_schedule(pre, post, cfg.lt), prog_rng,
              out.lt_ledger);
          out.st_programming_events += apply_schedule(
              st, p, cfg.st, i, j, stdp_event_schedule(pre, post, cfg.st), prog_rng,
              out.st_ledger);
        }
      }
    }
    for (int j = 0; j < p.n_neurons; ++j)
      out.spike_counts[static_cast<std::size_t>(j)] += epoch_counts[static_cast<std::size_t>(j)];
    divergence_diagnostics(epoch_counts, p.divergence_share, epoch, out.diagnostics);
  }

  const auto lt_w = lt.logical_weights();
  const auto st_w = st.logical_weights();
  out.lt_weights = WeightMatrix::zeros(inputs, p.n_neurons);
  out.lt_weights.w = lt_w;
  out.st_weights = WeightMatrix::zeros(inputs, p.n_neurons);
  out.st_weights.w = st_w;
  return out;
}

}  // namespace detail

// p.stdp supplies nothing here; the two arrays learn under cfg.lt / cfg.st
// (cfg.lt.mode selects the synapse technology for both).
inline LtStResult train_lt_st(const IdxImages& images, const UnsupervisedParams& p,
                              const LtStConfig& cfg, const RngStream& rng) {
  p.validate();
  cfg.validate();
  detail::check_dataset(images);
  if (cfg.lt.mode == StdpMode::Analog)
    return detail::train_two_arrays<MultibitCrossbar, MultibitSynapse>(images, p, cfg, rng);
  return detail::train_two_arrays<BinaryCrossbar, BinarySynapse>(images, p, cfg, rng);
}

// Classification on a trained two-array state: the frozen response pass sums
// the two column currents exactly as training did.
inline ClassificationResult classify_lt_st(const LtStResult& trained,
                                           const UnsupervisedParams& p, const LtStConfig& cfg,
                                           const IdxImages& labeled,
                                           const IdxLabels& labeled_labels,
                                           const IdxImages& test, const IdxLabels& test_labels,
                                           int n_classes, const RngStream& rng) {
  p.validate();
  cfg.validate();
  if (static_cast<std::size_t>(test.count) != test_labels.labels.size())
    throw std::invalid_argument("network: test image/label count mismatch");

  const auto run = [&](const auto& lt, const auto& st) {
    // Mirror assign_and_classify on the summed-current read.
    ClassificationResult out;
    out.assignment.response.assign(
        static_cast<std::size_t>(p.n_neurons),
        std::vector<std::uint64_t>(static_cast<std::size_t>(n_classes), 0));
    const auto counts_for = [&](const std::vector<double>& intensity, RngStream img_rng) {
      RngStream enc_rng = img_rng.substream("encode");
      RngStream neuron_rng = img_rng.substream("neurons");
      std::vector<double> theta = trained.thresholds;
      UnsupervisedParams q = p;
      q.homeostasis = HomeostasisParams{};
      EnergyLedger scratch;
      std::vector<std::uint64_t> posts(static_cast<std::size_t>(p.n_neurons), 0);
      const auto tally =
          detail::run_image_dynamics(q, intensity, theta, enc_rng, neuron_rng,
                                     [&](const std::vector<std::uint8_t>& active) {
                                       auto i_lt = lt.column_currents(active);
                                       const auto i_st = st.column_currents(active);
                                       for (std::size_t j = 0; j < i_lt.size(); ++j)
                                         i_lt[j] += i_st[j];
                                       return i_lt;
                                     },
                                     scratch, posts);
      return tally.fired;
    };

    for (int n = 0; n < labeled.count; ++n) {
      const int cls = labeled_labels.labels[static_cast<std::size_t>(n)];
      if (cls < 0 || cls >= n_classes)
        throw std::invalid_argument("network: label " + std::to_string(cls) +
                                    " outside the configured " + std::to_string(n_classes) +
                                    " classes");
      const auto counts = counts_for(image_intensity(labeled, n),
                                     rng.substream("assign").substream(static_cast<std::uint64_t>(n)));
      for (int j = 0; j < p.n_neurons; ++j)
        out.assignment.response[static_cast<std::size_t>(j)][static_cast<std::size_t>(cls)] +=
            counts[static_cast<std::size_t>(j)];
    }
    out.assignment.neuron_class.assign(static_cast<std::size_t>(p.n_neurons), -1);
    for (int j = 0; j < p.n_neurons; ++j) {
      const auto& r = out.assignment.response[static_cast<std::size_t>(j)];
      std::uint64_t best = 0;
      for (int c = 0; c < n_classes; ++c)
        if (r[static_cast<std::size_t>(c)] > best) {
          best = r[static_cast<std::size_t>(c)];
          out.assignment.neuron_class[static_cast<std::size_t>(j)] = c;
        }
    }

    out.predicted.assign(static_cast<std::size_t>(test.count), -1);
    int correct = 0;
    for (int n = 0; n < test.count; ++n) {
      const auto counts = counts_for(image_intensity(test, n),
                                     rng.substream("test").substream(static_cast<std::uint64_t>(n)));
      std::vector<std::uint64_t> votes(static_cast<std::size_t>(n_classes), 0);
      for (int j = 0; j < p.n_neurons; ++j) {
        const int cls = out.assignment.neuron_class[static_cast<std::size_t>(j)];
        if (cls >= 0)
          votes[static_cast<std::size_t>(cls)] += counts[static_cast<std::size_t>(j)];
      }
      std::uint64_t best = 0;
      int pred = -1;
      for (int c = 0; c < n_classes; ++c)
        if (votes[static_cast<std::size_t>(c)] > best) {
          best = votes[static_cast<std::size_t>(c)];
          pred = c;
        }
      out.predicted[static_cast<std::size_t>(n)] = pred;
      if (pred == test_labels.labels[static_cast<std::size_t>(n)]) ++correct;
    }
    out.accuracy = static_cast<double>(correct) / static_cast<double>(test.count);
    return out;
  };

  CrossbarConfig lt_cfg = p.xbar;
  lt_cfg.read_bias_V = cfg.lt_read_bias_V;
  CrossbarConfig st_cfg = p.xbar;
  st_cfg.read_bias_V = cfg.st_read_bias_V;
  UnsupervisedParams q_lt = p;
  q_lt.xbar = lt_cfg;
  UnsupervisedParams q_st = p;
  q_st.xbar = st_cfg;
  if (cfg.lt.mode == StdpMode::Analog) {
    const auto lt = detail::restore_crossbar<MultibitCrossbar>(trained.lt_weights, q_lt);
    const auto st = detail::restore_crossbar<MultibitCrossbar>(trained.st_weights, q_st);
    return run(lt, st);
  }
  const auto lt = detail::restore_crossbar<BinaryCrossbar>(trained.lt_weights, q_lt);
  const auto st = detail::restore_crossbar<BinaryCrossbar>(trained.st_weights, q_st);
  return run(lt, st);
}

// Pairwise similarity diagnostic for learned receptive fields: cosine between
// two neurons' weight columns (1 = identical shape, 0 = orthogonal).
inline double weight_column_cosine(const WeightMatrix& w, int j_a, int j_b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (int i = 0; i < w.rows; ++i) {
    const double a = w.at(i, j_a), b = w.at(i, j_b);
    dot += a * b;
    na += a * a;
    nb += b * b;
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

}  // namespace spinsnn
