#include "aud/rng.hpp"

namespace aud {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kLaneSalt = 0xd1b54a32d192ed03ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t substream_id)
    : RngStream(seed, substream_id,
                mix64(mix64(seed + kGolden) ^ (substream_id * kLaneSalt + 1))) {}

RngStream::RngStream(std::uint64_t seed, std::uint64_t substream, std::uint64_t key)
    : seed_(seed), substream_(substream), key_(key) {}

RngStream RngStream::lane(std::uint64_t lane_id) const {
  return RngStream(seed_, substream_, mix64(key_ ^ mix64(lane_id + kLaneSalt)));
}

std::uint64_t RngStream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double RngStream::uniform_open() {
  // 53 random bits, centred in their cell: never exactly 0 or 1.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace aud
