#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

// Deterministic, splittable random streams. Every stochastic component takes
// an RngStream identified by (seed, stream_id); the same pair always replays
// the same sequence, independent of thread scheduling. Monte Carlo drivers
// derive one substream per trial so results are bitwise reproducible for any
// worker count.
//
// Generator: xoshiro256++ (public-domain reference algorithm), state seeded
// via splitmix64 over (seed, stream_id). 32 bytes of state per stream makes
// per-trial streams cheap.

namespace spinsnn {

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t rotl(std::uint64_t v, int k) {
  return (v << k) | (v >> (64 - k));
}

}  // namespace detail

// FNV-1a over a label; used to derive module-specific stream ids from a
// single global seed without manual bookkeeping.
inline constexpr std::uint64_t stream_id_from_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline constexpr std::uint64_t combine_stream_ids(std::uint64_t a, std::uint64_t b) {
  // One splitmix64 round over the pair; good enough mixing for id derivation.
  std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  return detail::splitmix64(x);
}

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id) {
    std::uint64_t sm = seed ^ detail::splitmix64(stream_id);
    for (auto& w : s_) w = detail::splitmix64(sm);
    // xoshiro must not start from the all-zero state.
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x9e3779b97f4a7c15ULL;
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Derived stream, deterministic in (seed, stream_id, child). Used for
  // per-trial / per-image substreams.
  RngStream substream(std::uint64_t child) const {
    return RngStream(seed_, combine_stream_ids(stream_id_, child));
  }
  RngStream substream(std::string_view label) const {
    return substream(stream_id_from_label(label));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = detail::rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0,1), 53-bit mantissa.
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0,1]; avoids log(0) in Box-Muller.
  double uniform_pos() { return ((next_u64() >> 11) + 1) * 0x1.0p-53; }

  // Standard normal via Box-Muller (trig form), second value cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u = uniform_pos();
    const double v = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double ang = 6.283185307179586476925286766559 * v;
    spare_ = r * std::sin(ang);
    have_spare_ = true;
    return r * std::cos(ang);
  }

  // Bernoulli draw; p outside [0,1] is clamped.
  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform() < p;
  }

 private:
  std::uint64_t s_[4];
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace spinsnn
