#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "spinsnn/crossbar.hpp"
#include "spinsnn/rng.hpp"

using namespace spinsnn;

namespace {
constexpr double kTight = 1e-12;

// Independent electrical oracle: per tile, assemble the nodal equations for
// the column-line voltages from scratch (device conductances recomputed from
// the weight matrix with the raw device formulas, not the crossbar's caches)
// and solve the dense linear system with Gaussian elimination. Column current
// is the load-path current G_s * V_col, partial sums added per tile.
std::vector<double> kirchhoff_column_currents(const std::vector<double>& w, int rows,
                                              int cols,
                                              const std::vector<std::uint8_t>& active,
                                              const DwDeviceParams& dev,
                                              const CrossbarConfig& cfg) {
  std::vector<double> total(static_cast<std::size_t>(cols), 0.0);
  const double dv = cfg.read_bias_V;
  const int n_tiles = (rows + cfg.tile_rows - 1) / cfg.tile_rows;

  for (int t = 0; t < n_tiles; ++t) {
    const int i0 = t * cfg.tile_rows;
    const int i1 = std::min(rows, i0 + cfg.tile_rows);

    // Dense system A x = b over this tile's column-node voltages. The
    // columns do not couple, so A is diagonal, but we still assemble and
    // eliminate the full matrix: the point is an independent solution path.
    std::vector<double> a(static_cast<std::size_t>(cols) * cols, 0.0);
    std::vector<double> b(static_cast<std::size_t>(cols), 0.0);
    for (int j = 0; j < cols; ++j) {
      double g_sum = cfg.g_load_S;
      double drive = 0.0;
      for (int i = i0; i < i1; ++i) {
        const double wij = w[static_cast<std::size_t>(i) * cols + j];
        // Plus row carries positive weight, minus row negative; idle partner
        // parked at wall position 0 (the OFF state).
        const DwDeviceState xp{wij > 0.0 ? wij / cfg.w_max * dev.track_length_m : 0.0};
        const DwDeviceState xm{wij < 0.0 ? -wij / cfg.w_max * dev.track_length_m : 0.0};
        const double gp = dw_conductance(dev, xp, dv);
        const double gm = dw_conductance(dev, xm, dv);
        g_sum += gp + gm;
        if (active[static_cast<std::size_t>(i)]) drive += dv * gp - dv * gm;
      }
      a[static_cast<std::size_t>(j) * cols + j] = g_sum;
      b[static_cast<std::size_t>(j)] = drive;
    }

    // Gaussian elimination with partial pivoting.
    const int n = cols;
    for (int k = 0; k < n; ++k) {
      int piv = k;
      for (int r = k + 1; r < n; ++r)
        if (std::fabs(a[static_cast<std::size_t>(r) * n + k]) >
            std::fabs(a[static_cast<std::size_t>(piv) * n + k]))
          piv = r;
      if (piv != k) {
        for (int c = 0; c < n; ++c)
          std::swap(a[static_cast<std::size_t>(k) * n + c],
                    a[static_cast<std::size_t>(piv) * n + c]);
        std::swap(b[static_cast<std::size_t>(k)], b[static_cast<std::size_t>(piv)]);
      }
      for (int r = k + 1; r < n; ++r) {
        const double f =
            a[static_cast<std::size_t>(r) * n + k] / a[static_cast<std::size_t>(k) * n + k];
        if (f == 0.0) continue;
        for (int c = k; c < n; ++c)
          a[static_cast<std::size_t>(r) * n + c] -= f * a[static_cast<std::size_t>(k) * n + c];
        b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(k)];
      }
    }
    std::vector<double> v(static_cast<std::size_t>(n), 0.0);
    for (int k = n - 1; k >= 0; --k) {
      double acc = b[static_cast<std::size_t>(k)];
      for (int c = k + 1; c < n; ++c)
        acc -= a[static_cast<std::size_t>(k) * n + c] * v[static_cast<std::size_t>(c)];
      v[static_cast<std::size_t>(k)] = acc / a[static_cast<std::size_t>(k) * n + k];
    }

    for (int j = 0; j < cols; ++j)
      total[static_cast<std::size_t>(j)] += cfg.g_load_S * v[static_cast<std::size_t>(j)];
  }
  return total;
}
}  // namespace

TEST_CASE("crossbar stores signed weights on device pairs") {
  CrossbarConfig cfg;
  MultibitCrossbar xb(3, 2, MultibitSynapse{}, cfg);
  REQUIRE(xb.inputs() == 3);
  REQUIRE(xb.cols() == 2);

  // Parked at zero everywhere.
  for (double w : xb.logical_weights()) REQUIRE(w == 0.0);

  xb.set_weight(0, 0, 0.75);
  xb.set_weight(1, 1, -0.5);
  xb.set_weight(2, 0, 1.0);
  REQUIRE_THAT(xb.weight(0, 0), Catch::Matchers::WithinAbs(0.75, kTight));
  REQUIRE_THAT(xb.weight(1, 1), Catch::Matchers::WithinAbs(-0.5, kTight));
  REQUIRE_THAT(xb.weight(2, 0), Catch::Matchers::WithinAbs(1.0, kTight));
  REQUIRE(xb.weight(0, 1) == 0.0);

  // Reprogramming a signed weight re-parks the idle partner.
  xb.set_weight(1, 1, 0.25);
  REQUIRE_THAT(xb.weight(1, 1), Catch::Matchers::WithinAbs(0.25, kTight));

  // Full matrix round trip.
  const std::vector<double> w = {0.1, -0.2, 0.3, -0.4, 0.5, -0.6};
  xb.program_weights(w);
  const auto back = xb.logical_weights();
  for (std::size_t k = 0; k < w.size(); ++k)
    REQUIRE_THAT(back[k], Catch::Matchers::WithinAbs(w[k], kTight));

  REQUIRE_THROWS_AS(xb.set_weight(0, 0, 1.2), std::invalid_argument);
  REQUIRE_THROWS_AS(xb.set_weight(3, 0, 0.1), std::out_of_range);
  REQUIRE_THROWS_AS(xb.program_weights({0.1, 0.2}), std::invalid_argument);

  // Scaled full-range mapping.
  CrossbarConfig wide = cfg;
  wide.w_max = 4.0;
  MultibitCrossbar xw(1, 1, MultibitSynapse{}, wide);
  xw.set_weight(0, 0, -3.0);
  REQUIRE_THAT(xw.weight(0, 0), Catch::Matchers::WithinAbs(-3.0, kTight));
  REQUIRE_THROWS_AS(xw.set_weight(0, 0, 4.5), std::invalid_argument);
}

TEST_CASE("binary crossbar accepts only end-state weights") {
  CrossbarConfig cfg;
  BinaryCrossbar xb(2, 2, BinarySynapse{}, cfg);
  xb.set_weight(0, 0, 1.0);
  xb.set_weight(0, 1, -1.0);
  xb.set_weight(1, 0, 0.0);
  REQUIRE(xb.weight(0, 0) == 1.0);
  REQUIRE(xb.weight(0, 1) == -1.0);
  REQUIRE(xb.weight(1, 0) == 0.0);
  REQUIRE_THROWS_AS(xb.set_weight(1, 1, 0.5), std::invalid_argument);
}

TEST_CASE("single-cell column current in ideal mode") {
  CrossbarConfig cfg;
  cfg.ideal = true;
  MultibitCrossbar xb(1, 1, MultibitSynapse{}, cfg);
  xb.set_weight(0, 0, 1.0);

  // dV (G_P - G_AP(dV)) with the 50 mV roll-off on the OFF device:
  // G_AP(50 mV) = 20u * 1.01 / 2.01; frozen arithmetic.
  const auto i = xb.column_currents({1});
  REQUIRE_THAT(i[0], Catch::Matchers::WithinRel(4.975124378e-7, 1e-9));

  // Inactive input: no drive at all.
  REQUIRE(xb.column_currents({0})[0] == 0.0);

  // Zero net weight: the dual rows cancel exactly.
  xb.set_weight(0, 0, 0.0);
  REQUIRE(xb.column_currents({1})[0] == 0.0);

  // Sign symmetry.
  xb.set_weight(0, 0, 1.0);
  const double ip = xb.column_currents({1})[0];
  xb.set_weight(0, 0, -1.0);
  REQUIRE_THAT(xb.column_currents({1})[0], Catch::Matchers::WithinRel(-ip, kTight));
}

TEST_CASE("column loading factor") {
  CrossbarConfig cfg;  // G_s = 1/222.5
  MultibitCrossbar xb(2, 1, MultibitSynapse{}, cfg);
  xb.set_weight(0, 0, 1.0);
  xb.set_weight(1, 0, 1.0);

  // gamma = 2 (G_P + G_AP(dV)) * 222.5, frozen.
  REQUIRE_THAT(xb.gamma(0, 0), Catch::Matchers::WithinRel(1.337213930e-2, 1e-9));
  REQUIRE_THAT(xb.max_gamma(), Catch::Matchers::WithinRel(xb.gamma(0, 0), kTight));

  // Loading suppresses the current relative to ideal mode.
  CrossbarConfig ideal = cfg;
  ideal.ideal = true;
  MultibitCrossbar xi(2, 1, MultibitSynapse{}, ideal);
  xi.set_weight(0, 0, 1.0);
  xi.set_weight(1, 0, 1.0);
  const double i_loaded = xb.column_currents({1, 1})[0];
  const double i_ideal = xi.column_currents({1, 1})[0];
  REQUIRE(i_loaded < i_ideal);
  REQUIRE_THAT(i_loaded, Catch::Matchers::WithinRel(i_ideal / (1.0 + xb.gamma(0, 0)), kTight));
}

TEST_CASE("column currents match the kirchhoff nodal oracle") {
  RngStream rng(9090, 0);
  const MultibitSynapse proto;

  for (int trial = 0; trial < 100; ++trial) {
    RngStream r = rng.substream(static_cast<std::uint64_t>(trial));
    const int rows = 1 + static_cast<int>(r.next_u64() % 70);
    const int cols = 1 + static_cast<int>(r.next_u64() % 8);
    CrossbarConfig cfg;
    const int tile_choices[3] = {4, 8, 32};
    cfg.tile_rows = tile_choices[r.next_u64() % 3];
    cfg.ideal = false;

    std::vector<double> w(static_cast<std::size_t>(rows) * cols);
    for (auto& x : w) x = 2.0 * r.uniform() - 1.0;
    std::vector<std::uint8_t> active(static_cast<std::size_t>(rows));
    for (auto& a : active) a = r.uniform() < 0.5 ? 1 : 0;

    MultibitCrossbar xb(rows, cols, proto, cfg);
    xb.program_weights(w);
    const auto got = xb.column_currents(active);
    const auto want = kirchhoff_column_currents(w, rows, cols, active, proto.dev, cfg);

    for (int j = 0; j < cols; ++j) {
      const double scale = std::max(std::fabs(want[static_cast<std::size_t>(j)]), 1e-9);
      REQUIRE_THAT(got[static_cast<std::size_t>(j)],
                   Catch::Matchers::WithinAbs(want[static_cast<std::size_t>(j)],
                                              1e-12 * scale));
    }
  }
}

TEST_CASE("tiling splits the electrical load but not the ideal sum") {
  // 64 inputs, all weight 1, all active.
  const int rows = 64, cols = 3;
  std::vector<double> w(static_cast<std::size_t>(rows) * cols, 1.0);
  std::vector<std::uint8_t> active(static_cast<std::size_t>(rows), 1);

  CrossbarConfig mono;
  mono.tile_rows = 64;
  CrossbarConfig tiled;
  tiled.tile_rows = 16;

  // Ideal mode: tiling is pure reassociation of the same sum.
  CrossbarConfig mono_i = mono, tiled_i = tiled;
  mono_i.ideal = tiled_i.ideal = true;
  MultibitCrossbar xm(rows, cols, MultibitSynapse{}, mono_i);
  MultibitCrossbar xt(rows, cols, MultibitSynapse{}, tiled_i);
  xm.program_weights(w);
  xt.program_weights(w);
  const auto im = xm.column_currents(active);
  const auto it = xt.column_currents(active);
  for (int j = 0; j < cols; ++j)
    REQUIRE_THAT(it[static_cast<std::size_t>(j)],
                 Catch::Matchers::WithinRel(im[static_cast<std::size_t>(j)], kTight));

  // Loaded mode: each small tile sees a smaller gamma, so the digitally
  // summed current is strictly larger than the monolithic column's.
  MultibitCrossbar lm(rows, cols, MultibitSynapse{}, mono);
  MultibitCrossbar lt(rows, cols, MultibitSynapse{}, tiled);
  lm.program_weights(w);
  lt.program_weights(w);
  REQUIRE(lt.column_currents(active)[0] > lm.column_currents(active)[0]);
  REQUIRE(lt.max_gamma() < lm.max_gamma());
  REQUIRE(lt.tile_count() == 4);
}

TEST_CASE("crossbar read accounting charges active pairs and digital adds") {
  CrossbarConfig cfg;
  cfg.tile_rows = 2;  // 3 inputs -> 2 tiles
  MultibitCrossbar xb(3, 2, MultibitSynapse{}, cfg);
  xb.set_weight(0, 0, 1.0);
  xb.set_weight(0, 1, 0.5);
  xb.set_weight(2, 0, 0.25);

  EnergyLedger led;
  const EnergyCosts costs;
  const std::vector<std::uint8_t> active = {1, 0, 1};
  xb.column_currents(active, costs, led);

  // Two active inputs x two columns.
  REQUIRE(led.count(EnergyEvent::SynapseRead) == 4);

  // Independent energy arithmetic: dV^2 sum(G+ + G-) t_read over the active
  // rows, with every idle partner at the OFF conductance.
  const MtjParams mtj;
  const double g_off = mtj_conductance_ap(mtj, cfg.read_bias_V);
  auto g_on = [&](double u) { return mtj.g_p_S * u + g_off * (1.0 - u); };
  const double row0 = (g_on(1.0) + g_off) + (g_on(0.5) + g_off);
  const double row2 = (g_on(0.25) + g_off) + (g_on(0.0) + g_off);
  const double want = cfg.read_bias_V * cfg.read_bias_V * (row0 + row2) * cfg.read_window_s;
  REQUIRE_THAT(led.energy_J(EnergyEvent::SynapseRead),
               Catch::Matchers::WithinRel(want, 1e-9));

  // One digital add per column joins the two tiles.
  REQUIRE(led.count(EnergyEvent::DigitalAdd) == 2);
  REQUIRE_THAT(led.energy_J(EnergyEvent::DigitalAdd),
               Catch::Matchers::WithinRel(2.0 * costs.digital_add_J, kTight));

  // No inputs active: no reads, but the adders still run.
  EnergyLedger idle;
  xb.column_currents({0, 0, 0}, costs, idle);
  REQUIRE(idle.count(EnergyEvent::SynapseRead) == 0);
  REQUIRE(idle.energy_J(EnergyEvent::SynapseRead) == 0.0);
  REQUIRE(idle.count(EnergyEvent::DigitalAdd) == 2);

  // Single-tile arrays need no digital adds.
  CrossbarConfig one = cfg;
  one.tile_rows = 32;
  MultibitCrossbar xs(3, 2, MultibitSynapse{}, one);
  EnergyLedger led1;
  xs.column_currents(active, costs, led1);
  REQUIRE(led1.count(EnergyEvent::DigitalAdd) == 0);

  REQUIRE_THROWS_AS(xb.column_currents({1, 0}), std::invalid_argument);
}

TEST_CASE("in-place pulses reprogram crossbar devices") {
  CrossbarConfig cfg;
  MultibitCrossbar xb(2, 2, MultibitSynapse{}, cfg);
  EnergyLedger led;

  // Quarter-track pulse on the plus device of (0, 1).
  xb.apply_pulse(0, 1, true, Pulse{0.0, 0.5e-9, 10.6e-6}, led);
  REQUIRE_THAT(xb.weight(0, 1), Catch::Matchers::WithinRel(0.25, 1e-9));
  REQUIRE(led.count(EnergyEvent::DwWrite) == 1);

  // The conductance caches follow the programmed state.
  const auto before = xb.column_currents({1, 0});
  xb.apply_pulse(0, 1, true, Pulse{0.0, 0.5e-9, 10.6e-6}, led);
  const auto after = xb.column_currents({1, 0});
  REQUIRE(after[1] > before[1]);
  REQUIRE(after[0] == before[0]);

  // Pulsing the minus device pushes the signed weight negative.
  xb.apply_pulse(1, 0, false, Pulse{0.0, 2e-9, 10.6e-6}, led);
  REQUIRE_THAT(xb.weight(1, 0), Catch::Matchers::WithinAbs(-1.0, 1e-9));
}

TEST_CASE("stochastic flips reprogram binary crossbar devices") {
  SwitchingCharacterization curve;
  curve.pulse_width_s = 0.5e-9;
  curve.currents_A = {0.0, 50e-6, 100e-6};
  curve.p = {0.0, 0.5, 1.0};
  curve.stderr_ = {0.0, 0.0, 0.0};
  curve.trials_per_point = 100;

  CrossbarConfig cfg;
  BinaryCrossbar xb(1, 1, BinarySynapse{}, cfg);
  EnergyLedger led;
  RngStream rng(7171, 0);

  // p = 0.1 write attempts, plus device, until it lands parallel.
  const Pulse pot{0.0, 0.5e-9, 10e-6};
  int attempts = 0;
  while (xb.weight(0, 0) < 0.5 && attempts < 500) {
    xb.stochastic_flip(0, 0, true, pot, curve, 0.1, rng, led);
    ++attempts;
  }
  REQUIRE(xb.weight(0, 0) == 1.0);
  REQUIRE(led.count(EnergyEvent::DwWrite) == static_cast<std::uint64_t>(attempts));

  // The read path sees the flip.
  REQUIRE(xb.column_currents({1})[0] > 0.0);
}
