#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "vne/error.hpp"

namespace vne {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline void mulhilo32(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace detail

using Philox4x32Block = std::array<std::uint32_t, 4>;

/// Philox4x32-10 (Salmon et al., SC'11). Pure function of (counter, key).
inline Philox4x32Block philox4x32_10(Philox4x32Block ctr, std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    detail::mulhilo32(kM0, ctr[0], hi0, lo0);
    detail::mulhilo32(kM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

/// A counter-based random stream. The 64-bit seed is the Philox key, the
/// stream id fills the upper half of the counter and the draw index the lower
/// half, so (seed, stream_id) fixes the whole sequence and streams never need
/// to coordinate.
///
/// Conventions (frozen, tests pin seeds against them):
///   - uniform doubles take the top 53 bits of a 64-bit word;
///   - Gaussians use Box–Muller on (u1 in (0,1], u2 in [0,1)), emitting
///     r·cos(2πu2) then r·sin(2πu2); an odd tail discards the sine half;
///   - Rademacher signs consume one 64-bit word per 64 entries, LSB first.
class RngStream {
 public:
  RngStream() = default;
  RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Independent substream; derivation is a pure function of (stream_id, index).
  RngStream child(std::uint64_t index) const {
    const std::uint64_t id =
        detail::splitmix64(detail::splitmix64(stream_id_) ^ detail::splitmix64(index + 0x632BE59BD9B4E019ull));
    return RngStream(seed_, id);
  }

  std::uint64_t next_u64() {
    if (pos_ >= 4) refill();
    const std::uint64_t lo = buffer_[pos_];
    const std::uint64_t hi = buffer_[pos_ + 1];
    pos_ += 2;
    return (hi << 32) | lo;
  }

  /// Uniform in [0, 1).
  double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1].
  double next_uniform_open_zero() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

 private:
  void refill() {
    const Philox4x32Block ctr = {static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
                                 static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
    buffer_ = philox4x32_10(ctr, {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
    ++counter_;
    pos_ = 0;
  }

  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::uint64_t counter_ = 0;
  Philox4x32Block buffer_{};
  std::size_t pos_ = 4;
};

inline std::vector<double> gaussian_vector(RngStream& stream, std::size_t n) {
  require(n >= 1, Errc::empty_dimension, "gaussian_vector: n must be at least 1");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; i += 2) {
    const double u1 = stream.next_uniform_open_zero();
    const double u2 = stream.next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    out[i] = r * std::cos(theta);
    if (i + 1 < n) out[i + 1] = r * std::sin(theta);
  }
  return out;
}

inline std::vector<double> rademacher_vector(RngStream& stream, std::size_t n) {
  require(n >= 1, Errc::empty_dimension, "rademacher_vector: n must be at least 1");
  std::vector<double> out(n);
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 64 == 0) bits = stream.next_u64();
    out[i] = (bits & 1u) ? -1.0 : 1.0;
    bits >>= 1;
  }
  return out;
}

/// Unbiased draw from [0, bound) (Lemire's multiply-and-reject).
inline std::size_t uniform_index(RngStream& stream, std::size_t bound) {
  require(bound >= 1, Errc::invalid_argument, "uniform_index: bound must be at least 1");
  const std::uint64_t b = bound;
  unsigned __int128 product = static_cast<unsigned __int128>(stream.next_u64()) * b;
  auto low = static_cast<std::uint64_t>(product);
  if (low < b) {
    const std::uint64_t threshold = (0 - b) % b;
    while (low < threshold) {
      product = static_cast<unsigned __int128>(stream.next_u64()) * b;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::size_t>(product >> 64);
}

}  // namespace vne
