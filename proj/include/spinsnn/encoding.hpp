#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinsnn/rng.hpp"

// Rate encoding: an intensity vector becomes a timestep-indexed binary spike
// train, one independent Bernoulli draw per (timestep, input) with
// p = intensity * max_rate * dt.

namespace spinsnn {

struct SpikeTrain {
  int timesteps = 0;
  int inputs = 0;
  double dt_s = 0.0;
  std::vector<std::uint8_t> bits;  // row-major, timesteps x inputs

  bool at(int t, int i) const {
    if (t < 0 || t >= timesteps || i < 0 || i >= inputs)
      throw std::out_of_range("spike train: index out of range");
    return bits[static_cast<std::size_t>(t) * inputs + i] != 0;
  }

  // One timestep's input mask, in the shape crossbar reads expect.
  const std::uint8_t* row(int t) const {
    if (t < 0 || t >= timesteps) throw std::out_of_range("spike train: timestep out of range");
    return bits.data() + static_cast<std::size_t>(t) * inputs;
  }

  std::uint64_t spike_count() const {
    std::uint64_t n = 0;
    for (auto b : bits) n += b;
    return n;
  }
};

inline SpikeTrain poisson_encode(const std::vector<double>& intensity, int timesteps,
                                 double max_rate_hz, double dt_s, RngStream& rng) {
  if (timesteps < 0) throw std::invalid_argument("encode: timesteps must be >= 0");
  if (max_rate_hz <= 0.0) throw std::invalid_argument("encode: max rate must be > 0");
  if (dt_s <= 0.0) throw std::invalid_argument("encode: dt must be > 0");
  if (max_rate_hz * dt_s > 1.0)
    throw std::invalid_argument("encode: max_rate * dt = " +
                                std::to_string(max_rate_hz * dt_s) +
                                " exceeds 1 spike per step");
  for (double v : intensity)
    if (v < 0.0 || v > 1.0)
      throw std::invalid_argument("encode: intensities must lie in [0, 1]");

  SpikeTrain out;
  out.timesteps = timesteps;
  out.inputs = static_cast<int>(intensity.size());
  out.dt_s = dt_s;
  out.bits.assign(static_cast<std::size_t>(timesteps) * intensity.size(), 0);
  std::size_t k = 0;
  for (int t = 0; t < timesteps; ++t)
    for (double v : intensity)
      out.bits[k++] = rng.bernoulli(v * max_rate_hz * dt_s) ? 1 : 0;
  return out;
}

}  // namespace spinsnn
