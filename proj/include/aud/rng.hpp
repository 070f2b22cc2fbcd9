#pragma once

#include <cstdint>

namespace aud {

/// Counter-based random stream.
///
/// The n-th draw is a pure function of (seed, substream, lane, n), so two
/// streams built from the same identifiers produce bit-identical sequences
/// regardless of what other streams were created or consumed in between.
/// Each draw is the SplitMix64 finalizer applied to `key + n * golden`, where
/// the key is a hash of the identifiers.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t substream_id);

  /// Independent child stream for one stochastic process of a run
  /// (arrivals, service, decisions, phase).
  [[nodiscard]] RngStream lane(std::uint64_t lane_id) const;

  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1).
  double uniform_open();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t substream_id() const { return substream_; }
  std::uint64_t draws() const { return counter_; }

 private:
  RngStream(std::uint64_t seed, std::uint64_t substream, std::uint64_t key);

  std::uint64_t seed_;
  std::uint64_t substream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// SplitMix64 output function.
std::uint64_t mix64(std::uint64_t x);

}  // namespace aud
