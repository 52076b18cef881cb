#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "spinsnn/constants.hpp"
#include "spinsnn/pulse.hpp"
#include "spinsnn/rng.hpp"
#include "spinsnn/vec3.hpp"

// Stochastic macrospin dynamics for mono-domain nanomagnets.
//
// The magnet is a single unit moment m driven by the explicit-form LLG
// equation with a Slonczewski spin-torque term:
//
//   (1+a^2)/g * dm/dt = -(m x H) - a m x (m x H)
//                       + 1/(q g Ns) * [ a (m x Is) - m x (m x Is) ]
//
// with g = 2*mu_B*mu0/hbar (fields in A/m), Ns = Ms*V/mu_B the number of Bohr
// magnetons in the body, and Is the spin current in ampere along its
// polarization axis. H collects uniaxial anisotropy, ellipsoid demagnetization,
// any external field, and -- at finite temperature -- a Gaussian thermal field
//
//   sigma_H = sqrt( a/(1+a^2) * 2 kB T / (g mu0 Ms V dt) )   per component,
//
// drawn fresh each step and held fixed across both stages of the Heun
// predictor-corrector (Stratonovich convention). |m| is renormalized to 1
// after every stage.

namespace spinsnn {

struct MagnetParams {
  double ms_A_per_m = 1e6;        // saturation magnetization [A/m]
  double ku2_J_per_m3 = 4e4;      // uniaxial anisotropy energy density [J/m^3]
  double volume_m3 = 1e-24;       // magnet volume [m^3]
  double alpha = 0.01;            // Gilbert damping, dimensionless, > 0
  double temperature_K = 300.0;   // bath temperature [K]
  double polarization = 0.7;      // spin polarization for through-stack (STT) drive
  Vec3 easy_axis = {0.0, 0.0, 1.0};  // unit vector
  Vec3 demag_n = {0.0, 0.0, 0.0};    // ellipsoid demag factors (Nx,Ny,Nz), sum<=1

  void validate() const {
    if (ms_A_per_m <= 0.0) throw std::invalid_argument("magnet: Ms must be > 0");
    if (volume_m3 <= 0.0) throw std::invalid_argument("magnet: volume must be > 0");
    if (ku2_J_per_m3 < 0.0) throw std::invalid_argument("magnet: Ku2 must be >= 0");
    if (alpha <= 0.0) throw std::invalid_argument("magnet: damping alpha must be > 0");
    if (temperature_K < 0.0) throw std::invalid_argument("magnet: temperature must be >= 0");
    if (norm(easy_axis) == 0.0) throw std::invalid_argument("magnet: easy axis must be nonzero");
  }

  Vec3 unit_easy_axis() const { return normalized(easy_axis); }

  // Spins in the body, Ns = Ms V / mu_B.
  double spin_count() const { return ms_A_per_m * volume_m3 / constants::mu_bohr; }
};

// Spin-Hall charge->spin conversion for a heavy-metal underlayer:
// Is = theta_SH * (W_FM / t_HM) * Iq. Gain above 1 means the geometry
// multiplies the injected spin current past the charge current.
struct SheParams {
  double theta_sh = 0.3;    // spin-Hall angle
  double w_fm_m = 40e-9;    // magnet footprint along the current path [m]
  double t_hm_m = 2e-9;     // heavy-metal thickness [m]

  void validate() const {
    if (t_hm_m <= 0.0) throw std::invalid_argument("she: heavy-metal thickness must be > 0");
    if (w_fm_m <= 0.0) throw std::invalid_argument("she: magnet width must be > 0");
  }
  double gain() const {
    validate();
    return theta_sh * w_fm_m / t_hm_m;
  }
};

// --- Scalar device relations -------------------------------------------------

// Uniaxial barrier between the two easy-axis wells, E_B = Ku2 * V [J].
inline double energy_barrier(const MagnetParams& p) {
  p.validate();
  return p.ku2_J_per_m3 * p.volume_m3;
}

// Arrhenius retention estimate tau = tau0 * exp(E_B / kB T) [s].
inline double arrhenius_lifetime(double barrier_J, double temperature_K,
                                 double attempt_time_s = 1e-9) {
  if (temperature_K <= 0.0) return std::numeric_limits<double>::infinity();
  if (attempt_time_s <= 0.0) throw std::invalid_argument("attempt time must be > 0");
  return attempt_time_s * std::exp(barrier_J / constants::kT(temperature_K));
}

// TMR in percent: (R_AP - R_P)/R_P * 100.
inline double tmr_ratio(double r_parallel_ohm, double r_antiparallel_ohm) {
  if (r_parallel_ohm <= 0.0) throw std::invalid_argument("tmr: R_P must be > 0");
  return (r_antiparallel_ohm - r_parallel_ohm) / r_parallel_ohm * 100.0;
}

// Spin current injected by a charge current through the heavy metal [A].
inline double she_spin_current(const SheParams& she, double charge_current_A) {
  return she.gain() * charge_current_A;
}

// --- Fields and energy -------------------------------------------------------

// Deterministic effective field: uniaxial + ellipsoid demag + external [A/m].
inline Vec3 effective_field(const MagnetParams& p, const Vec3& m,
                            const Vec3& h_ext_A_per_m = {}) {
  const Vec3 e = p.unit_easy_axis();
  const double hk_coeff = 2.0 * p.ku2_J_per_m3 / (constants::mu0 * p.ms_A_per_m);
  const Vec3 h_uni = e * (hk_coeff * dot(m, e));
  const Vec3 h_dem = {-p.ms_A_per_m * p.demag_n.x * m.x,
                      -p.ms_A_per_m * p.demag_n.y * m.y,
                      -p.ms_A_per_m * p.demag_n.z * m.z};
  return h_uni + h_dem + h_ext_A_per_m;
}

// Per-component standard deviation of the thermal field for step dt [A/m].
inline double thermal_field_sigma(const MagnetParams& p, double dt_s) {
  if (dt_s <= 0.0) throw std::invalid_argument("thermal field: dt must be > 0");
  if (p.temperature_K == 0.0) return 0.0;
  const double a = p.alpha;
  return std::sqrt(a / (1.0 + a * a) * 2.0 * constants::kT(p.temperature_K) /
                   (constants::gamma_llg * constants::mu0 * p.ms_A_per_m * p.volume_m3 * dt_s));
}

inline Vec3 thermal_field(const MagnetParams& p, double dt_s, RngStream& rng) {
  const double s = thermal_field_sigma(p, dt_s);
  if (s == 0.0) return {};
  return {s * rng.normal(), s * rng.normal(), s * rng.normal()};
}

// Magnetic energy of configuration m [J]; used by dissipation tests.
// Uniaxial: -Ku2 V (m.e)^2, demag: +mu0/2 Ms^2 V sum(Ni mi^2), Zeeman: -mu0 Ms V (m.H).
inline double magnetic_energy(const MagnetParams& p, const Vec3& m,
                              const Vec3& h_ext_A_per_m = {}) {
  const Vec3 e = p.unit_easy_axis();
  const double me = dot(m, e);
  const double e_uni = -p.ku2_J_per_m3 * p.volume_m3 * me * me;
  const double e_dem = 0.5 * constants::mu0 * p.ms_A_per_m * p.ms_A_per_m * p.volume_m3 *
                       (p.demag_n.x * m.x * m.x + p.demag_n.y * m.y * m.y +
                        p.demag_n.z * m.z * m.z);
  const double e_zee = -constants::mu0 * p.ms_A_per_m * p.volume_m3 * dot(m, h_ext_A_per_m);
  return e_uni + e_dem + e_zee;
}

// --- Integrator ---------------------------------------------------------------

// Precomputed step coefficients for one (params, dt) pair. Construct once,
// then step() millions of times; nothing in here allocates.
class LlgIntegrator {
 public:
  LlgIntegrator(const MagnetParams& p, double dt_s) : p_(p), dt_(dt_s) {
    p.validate();
    if (dt_s <= 0.0) throw std::invalid_argument("llg: dt must be > 0");
    const double a = p.alpha;
    e_ = p.unit_easy_axis();
    pref_ = constants::gamma_llg / (1.0 + a * a);
    stt_c_ = 1.0 / (constants::q_electron * p.spin_count() * (1.0 + a * a));
    hk_coeff_ = 2.0 * p.ku2_J_per_m3 / (constants::mu0 * p.ms_A_per_m);
    dem_ = {p.ms_A_per_m * p.demag_n.x, p.ms_A_per_m * p.demag_n.y,
            p.ms_A_per_m * p.demag_n.z};
    sigma_ = thermal_field_sigma(p, dt_s);
  }

  double dt() const { return dt_; }
  const MagnetParams& params() const { return p_; }

  // One Heun step. is_A: spin current vector [A] (magnitude along polarization
  // axis). h_ext: external field [A/m]. Thermal field drawn from rng if T > 0.
  Vec3 step(const Vec3& m, const Vec3& is_A, const Vec3& h_ext, RngStream& rng) const {
    Vec3 h_th{};
    if (sigma_ != 0.0)
      h_th = {sigma_ * rng.normal(), sigma_ * rng.normal(), sigma_ * rng.normal()};
    return step_with_noise(m, is_A, h_ext, h_th);
  }

  // Deterministic step with an externally supplied (frozen) thermal field;
  // exposed so tests can probe the two Heun stages directly.
  Vec3 step_with_noise(const Vec3& m, const Vec3& is_A, const Vec3& h_ext,
                       const Vec3& h_th) const {
    const Vec3 f1 = rhs(m, is_A, h_ext, h_th);
    const Vec3 mp = normalized(m + f1 * dt_);
    const Vec3 f2 = rhs(mp, is_A, h_ext, h_th);
    return normalized(m + (f1 + f2) * (0.5 * dt_));
  }

 private:
  Vec3 rhs(const Vec3& m, const Vec3& is, const Vec3& h_ext, const Vec3& h_th) const {
    const double a = p_.alpha;
    const Vec3 h = {hk_coeff_ * dot(m, e_) * e_.x - dem_.x * m.x + h_ext.x + h_th.x,
                    hk_coeff_ * dot(m, e_) * e_.y - dem_.y * m.y + h_ext.y + h_th.y,
                    hk_coeff_ * dot(m, e_) * e_.z - dem_.z * m.z + h_ext.z + h_th.z};
    const Vec3 mxh = cross(m, h);
    const Vec3 mxmxh = cross(m, mxh);
    Vec3 f = (mxh + mxmxh * a) * (-pref_);
    if (is.x != 0.0 || is.y != 0.0 || is.z != 0.0) {
      const Vec3 mxi = cross(m, is);
      const Vec3 mxmxi = cross(m, mxi);
      f += (mxi * a - mxmxi) * stt_c_;
    }
    return f;
  }

  MagnetParams p_;
  double dt_;
  Vec3 e_;
  double pref_;     // gamma/(1+a^2)
  double stt_c_;    // 1/(q Ns (1+a^2))
  double hk_coeff_; // 2 Ku2 / (mu0 Ms)
  Vec3 dem_;        // Ms * N, per axis
  double sigma_;    // thermal field sigma per component for this dt
};

// Single-step convenience wrapper matching the rest of the free-function API.
inline Vec3 llg_step(const MagnetParams& p, const Vec3& m, const Vec3& spin_current_A,
                     const Vec3& h_ext_A_per_m, double dt_s, RngStream& rng) {
  return LlgIntegrator(p, dt_s).step(m, spin_current_A, h_ext_A_per_m, rng);
}

// --- Trajectory runs ----------------------------------------------------------

struct Trajectory {
  std::vector<double> t_s;
  std::vector<Vec3> m;
  Vec3 final_m() const { return m.empty() ? Vec3{} : m.back(); }
};

// Integrate under a charge-current pulse train converted through the spin-Hall
// geometry; injected spins point along polarization_axis, signed by the
// instantaneous current. Samples every `stride` steps (always includes t=0 and
// the final state).
inline Trajectory simulate(const MagnetParams& p, const Vec3& m0, const PulseTrain& drive,
                           const SheParams& she, const Vec3& polarization_axis,
                           double dt_s, RngStream& rng, double extra_settle_s = 0.0,
                           int stride = 1, const Vec3& h_ext = {}) {
  if (stride < 1) throw std::invalid_argument("simulate: stride must be >= 1");
  const Vec3 pol = normalized(polarization_axis);
  const double gain = she.gain();
  const double t_end = drive.span_s() + extra_settle_s;
  const auto n_steps = static_cast<std::int64_t>(std::ceil(t_end / dt_s - 1e-12));
  LlgIntegrator integ(p, dt_s);

  Trajectory traj;
  traj.t_s.reserve(static_cast<std::size_t>(n_steps / stride + 2));
  traj.m.reserve(static_cast<std::size_t>(n_steps / stride + 2));
  Vec3 m = normalized(m0);
  traj.t_s.push_back(0.0);
  traj.m.push_back(m);
  for (std::int64_t k = 0; k < n_steps; ++k) {
    // Current sampled at the step midpoint so pulse edges land on step
    // boundaries rather than straddling them.
    const double iq = drive.current_at((k + 0.5) * dt_s);
    const Vec3 is = pol * (gain * iq);
    m = integ.step(m, is, h_ext, rng);
    if ((k + 1) % stride == 0 || k + 1 == n_steps) {
      traj.t_s.push_back((k + 1) * dt_s);
      traj.m.push_back(m);
    }
  }
  return traj;
}

// Zero-drive relaxation until |m.e| exceeds `decided` or t_max elapses.
// Returns the final state.
inline Vec3 relax(const MagnetParams& p, Vec3 m, double dt_s, RngStream& rng,
                  double t_max_s, double decided = 0.99) {
  LlgIntegrator integ(p, dt_s);
  const Vec3 e = p.unit_easy_axis();
  const auto n_steps = static_cast<std::int64_t>(std::ceil(t_max_s / dt_s));
  for (std::int64_t k = 0; k < n_steps; ++k) {
    m = integ.step(m, {}, {}, rng);
    if (std::fabs(dot(m, e)) >= decided) break;
  }
  return m;
}

// --- Switching statistics -----------------------------------------------------

struct SwitchingProtocol {
  double dt_s = 1e-12;           // integration step
  double thermalize_s = 5e-9;    // zero-drive window before the pulse
  double pulse_width_s = 0.5e-9; // write-cycle width
};

struct ProbabilityEstimate {
  double p = 0.0;
  double stderr_ = 0.0;  // sqrt(p(1-p)/n)
  int trials = 0;
};

// Fraction of trials where a charge-current pulse (SHE-converted, spins
// injected antiparallel to the easy axis) reverses the magnet. Each trial:
// start at +e, thermalize at zero drive, apply the pulse, test m.e < 0 at
// pulse end. Trial k draws from rng.substream(k), so estimates do not depend
// on execution order.
inline ProbabilityEstimate switching_probability(const MagnetParams& p, const SheParams& she,
                                                 double charge_current_A, int trials,
                                                 const SwitchingProtocol& proto,
                                                 const RngStream& rng) {
  if (trials <= 0) throw std::invalid_argument("switching: trials must be > 0");
  const Vec3 e = p.unit_easy_axis();
  const double is_mag = she_spin_current(she, charge_current_A);
  const Vec3 is = e * (-is_mag);  // antiparallel injection drives the reversal
  LlgIntegrator integ(p, proto.dt_s);
  const auto n_th = static_cast<std::int64_t>(std::llround(proto.thermalize_s / proto.dt_s));
  const auto n_pl = static_cast<std::int64_t>(std::llround(proto.pulse_width_s / proto.dt_s));

  int reversed = 0;
  for (int k = 0; k < trials; ++k) {
    RngStream r = rng.substream(static_cast<std::uint64_t>(k));
    Vec3 m = e;
    for (std::int64_t i = 0; i < n_th; ++i) m = integ.step(m, {}, {}, r);
    for (std::int64_t i = 0; i < n_pl; ++i) m = integ.step(m, is, {}, r);
    if (dot(m, e) < 0.0) ++reversed;
  }
  const double ph = static_cast<double>(reversed) / trials;
  return {ph, std::sqrt(ph * (1.0 - ph) / trials), trials};
}

// --- Sigmoid characterization ---------------------------------------------------

struct SigmoidFit {
  double i50_A = 0.0;    // current at P = 0.5
  double width_A = 0.0;  // logistic width
  double r2 = 0.0;       // coefficient of determination in probability space
  bool valid = false;
};

// Least-squares logistic fit p(I) = 1/(1+exp(-(I-i50)/w)) via damped
// Gauss-Newton. Robust to steep transitions (falls back to the empirical
// 0.5-crossing if the solver stalls).
inline SigmoidFit fit_switching_sigmoid(const std::vector<double>& currents,
                                        const std::vector<double>& probs) {
  if (currents.size() != probs.size() || currents.size() < 3)
    throw std::invalid_argument("sigmoid fit: need >= 3 (current, p) points");
  const std::size_t n = currents.size();

  // Initial guess: interpolated 0.5 crossing; width from the 0.25..0.75 span.
  double i50 = currents[n / 2];
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if ((probs[i] - 0.5) * (probs[i + 1] - 0.5) <= 0.0 && probs[i] != probs[i + 1]) {
      i50 = currents[i] + (0.5 - probs[i]) * (currents[i + 1] - currents[i]) /
                              (probs[i + 1] - probs[i]);
      break;
    }
  }
  double span = (currents.back() - currents.front());
  double w = span / 20.0;

  auto sse = [&](double c, double wid) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double pm = 1.0 / (1.0 + std::exp(-(currents[i] - c) / wid));
      s += (pm - probs[i]) * (pm - probs[i]);
    }
    return s;
  };

  double lambda = 1e-3;
  double best = sse(i50, w);
  for (int iter = 0; iter < 200; ++iter) {
    // Gauss-Newton normal equations for (i50, w).
    double jtj00 = 0, jtj01 = 0, jtj11 = 0, jtr0 = 0, jtr1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = (currents[i] - i50) / w;
      const double pm = 1.0 / (1.0 + std::exp(-z));
      const double dpdz = pm * (1.0 - pm);
      const double d_i50 = -dpdz / w;
      const double d_w = -dpdz * z / w;
      const double r = pm - probs[i];
      jtj00 += d_i50 * d_i50;
      jtj01 += d_i50 * d_w;
      jtj11 += d_w * d_w;
      jtr0 += d_i50 * r;
      jtr1 += d_w * r;
    }
    jtj00 += lambda * (jtj00 + 1e-30);
    jtj11 += lambda * (jtj11 + 1e-30);
    const double det = jtj00 * jtj11 - jtj01 * jtj01;
    if (det == 0.0 || !std::isfinite(det)) break;
    const double di50 = (-jtr0 * jtj11 + jtr1 * jtj01) / det;
    const double dw = (-jtr1 * jtj00 + jtr0 * jtj01) / det;
    double ni50 = i50 + di50;
    double nw = w + dw;
    if (!(nw > span * 1e-6)) nw = span * 1e-6;  // keep width positive
    const double s = sse(ni50, nw);
    if (s < best) {
      best = s;
      i50 = ni50;
      w = nw;
      lambda = std::fmax(lambda * 0.5, 1e-9);
      if (best < 1e-16) break;
    } else {
      lambda *= 4.0;
      if (lambda > 1e6) break;
    }
  }

  double mean = 0.0;
  for (double p : probs) mean += p;
  mean /= static_cast<double>(n);
  double ss_tot = 0.0;
  for (double p : probs) ss_tot += (p - mean) * (p - mean);
  SigmoidFit fit;
  fit.i50_A = i50;
  fit.width_A = w;
  fit.r2 = ss_tot > 0.0 ? 1.0 - best / ss_tot : 1.0;
  fit.valid = std::isfinite(i50) && std::isfinite(w);
  return fit;
}

// Full write-cycle characterization over a current grid: the raw curve plus a
// logistic fit. This is the shared calibration artifact consumed by the
// stochastic neuron lookup backend and the probabilistic synapse programmer.
struct SwitchingCharacterization {
  double pulse_width_s = 0.0;
  std::vector<double> currents_A;
  std::vector<double> p;
  std::vector<double> stderr_;
  int trials_per_point = 0;
  SigmoidFit fit;
};

// Switching probability at an arbitrary write amplitude, linearly interpolated
// on the characterized grid. Amplitudes outside the grid are refused rather
// than extrapolated: the curve is only trusted where it was measured.
inline double interp_switching_probability(const SwitchingCharacterization& c,
                                           double current_A) {
  if (c.currents_A.size() < 2 || c.currents_A.size() != c.p.size())
    throw std::invalid_argument("switching curve: need >= 2 characterized points");
  const auto& xs = c.currents_A;
  if (current_A < xs.front() || current_A > xs.back())
    throw std::out_of_range("switching curve: amplitude outside characterized range");
  auto it = std::upper_bound(xs.begin(), xs.end(), current_A);
  std::size_t hi = std::min(static_cast<std::size_t>(it - xs.begin()), xs.size() - 1);
  if (hi == 0) hi = 1;
  const std::size_t lo = hi - 1;
  const double t = (current_A - xs[lo]) / (xs[hi] - xs[lo]);
  return c.p[lo] + t * (c.p[hi] - c.p[lo]);
}

inline SwitchingCharacterization characterize_switching(
    const MagnetParams& p, const SheParams& she, const std::vector<double>& currents_A,
    int trials, const SwitchingProtocol& proto, const RngStream& rng) {
  if (currents_A.size() < 2)
    throw std::invalid_argument("characterize: need at least 2 grid currents");
  SwitchingCharacterization out;
  out.pulse_width_s = proto.pulse_width_s;
  out.currents_A = currents_A;
  out.trials_per_point = trials;
  out.p.resize(currents_A.size());
  out.stderr_.resize(currents_A.size());
  for (std::size_t i = 0; i < currents_A.size(); ++i) {
    // Fixed substream per grid point: the estimate for a given point is
    // independent of which other points are swept.
    const auto est = switching_probability(p, she, currents_A[i], trials, proto,
                                           rng.substream(i));
    out.p[i] = est.p;
    out.stderr_[i] = est.stderr_;
  }
  out.fit = fit_switching_sigmoid(out.currents_A, out.p);
  return out;
}

}  // namespace spinsnn
