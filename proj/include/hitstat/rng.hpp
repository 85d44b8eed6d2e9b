#pragma once

#include <array>
#include <cstdint>

namespace hitstat {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The 64-bit experiment seed is the key; the 128-bit counter is split into
/// a 64-bit substream id and a 64-bit block index. Sample j of an experiment
/// draws from its own substream, so results do not depend on which worker
/// ran it or in what order.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t substream) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        substream_(substream) {}

  std::uint64_t next_u64() noexcept {
    if (used_ >= 2) refill();
    auto lo = static_cast<std::uint64_t>(block_[2 * used_]);
    auto hi = static_cast<std::uint64_t>(block_[2 * used_ + 1]);
    ++used_;
    return (hi << 32) | lo;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  std::uint64_t substream() const noexcept { return substream_; }

  /// Raw Philox block for a counter; exposed for known-answer tests.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                            std::array<std::uint32_t, 2> key) noexcept;

 private:
  void refill() noexcept {
    std::array<std::uint32_t, 4> ctr{static_cast<std::uint32_t>(index_), static_cast<std::uint32_t>(index_ >> 32),
                                     static_cast<std::uint32_t>(substream_),
                                     static_cast<std::uint32_t>(substream_ >> 32)};
    block_ = block(ctr, key_);
    ++index_;
    used_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t substream_;
  std::uint64_t index_ = 0;
  std::array<std::uint32_t, 4> block_{};
  unsigned used_ = 2;
};

inline std::array<std::uint32_t, 4> CounterRng::block(std::array<std::uint32_t, 4> ctr,
                                                      std::array<std::uint32_t, 2> key) noexcept {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

/// Substream layout shared by the experiment layer: each sample index owns
/// a small block of role-tagged streams.
enum class StreamRole : std::uint64_t { Target = 0, Orbit = 1, Inner = 2, Offsets = 3 };

constexpr std::uint64_t substream_id(std::uint64_t sample, StreamRole role) noexcept {
  return sample * 4 + static_cast<std::uint64_t>(role);
}

}  // namespace hitstat
