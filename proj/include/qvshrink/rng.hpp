#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace qvshrink {

/// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
///
/// Each (key, stream prefix) pair addresses an independent stream of 2^32
/// blocks of four 32-bit words. Replications get disjoint streams, so draws
/// are reproducible regardless of thread scheduling or evaluation order.
class Philox {
 public:
  using result_type = std::uint32_t;

  Philox() : Philox(0, 0, 0, 0) {}

  /// Stream (hi, mid, lo) under the 64-bit key; the low counter word starts
  /// at zero and advances as values are consumed.
  Philox(std::uint64_t key, std::uint32_t hi, std::uint32_t mid,
         std::uint32_t lo)
      : key_{static_cast<std::uint32_t>(key),
             static_cast<std::uint32_t>(key >> 32)},
        counter_{0, lo, mid, hi} {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xffffffffu; }

  result_type operator()() {
    if (pos_ == 4) {
      block_ = round10(counter_, key_);
      ++counter_[0];  // 2^32 blocks per stream; never exhausted in practice
      pos_ = 0;
    }
    return block_[pos_++];
  }

  static std::array<std::uint32_t, 4> round10(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key);

 private:
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  int pos_ = 4;
};

inline std::array<std::uint32_t, 4> Philox::round10(
    std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kMulA = 0xD2511F53u;
  constexpr std::uint32_t kMulB = 0xCD9E8D57u;
  constexpr std::uint32_t kBumpA = 0x9E3779B9u;
  constexpr std::uint32_t kBumpB = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t prod0 = std::uint64_t{kMulA} * ctr[0];
    const std::uint64_t prod1 = std::uint64_t{kMulB} * ctr[2];
    const auto lo0 = static_cast<std::uint32_t>(prod0);
    const auto hi0 = static_cast<std::uint32_t>(prod0 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(prod1);
    const auto hi1 = static_cast<std::uint32_t>(prod1 >> 32);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kBumpA;
    key[1] += kBumpB;
  }
  return ctr;
}

/// Uniform double in the open interval (0, 1), built from 53 random bits.
inline double uniform01(Philox& rng) {
  const std::uint64_t hi = rng();
  const std::uint64_t lo = rng();
  const std::uint64_t bits = ((hi << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

/// FNV-1a hash, used to tag streams by scenario id.
inline std::uint32_t fnv1a32(std::string_view text) {
  std::uint32_t h = 0x811c9dc5u;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x01000193u;
  }
  return h;
}

}  // namespace qvshrink
