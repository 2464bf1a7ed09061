#pragma once

#include <cstdint>
#include <limits>

namespace fbmq {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
//
// The 128-bit counter is split into a 64-bit block index (lanes 0,1) and a
// 64-bit stream id (lanes 2,3); the 64-bit key carries the master seed.
// Substreams for distinct replicate indices are statistically independent, so
// replicate-level parallelism never changes the sample set: the draws for
// replicate i depend only on (master seed, i), not on thread scheduling.
class Philox4x32 {
 public:
  using result_type = std::uint64_t;

  Philox4x32(std::uint64_t master_seed, std::uint64_t stream_id) noexcept
      : key0_(static_cast<std::uint32_t>(master_seed)),
        key1_(static_cast<std::uint32_t>(master_seed >> 32)),
        stream_lo_(static_cast<std::uint32_t>(stream_id)),
        stream_hi_(static_cast<std::uint32_t>(stream_id >> 32)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    if (have_buffered_) {
      have_buffered_ = false;
      return buffered_;
    }
    std::uint32_t c0 = static_cast<std::uint32_t>(block_);
    std::uint32_t c1 = static_cast<std::uint32_t>(block_ >> 32);
    std::uint32_t c2 = stream_lo_;
    std::uint32_t c3 = stream_hi_;
    std::uint32_t k0 = key0_;
    std::uint32_t k1 = key1_;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c0;
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c2;
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      const std::uint32_t n0 = hi1 ^ c1 ^ k0;
      const std::uint32_t n1 = lo1;
      const std::uint32_t n2 = hi0 ^ c3 ^ k1;
      const std::uint32_t n3 = lo0;
      c0 = n0; c1 = n1; c2 = n2; c3 = n3;
      k0 += kWeyl0;
      k1 += kWeyl1;
    }
    ++block_;
    buffered_ = (static_cast<std::uint64_t>(c3) << 32) | c2;
    have_buffered_ = true;
    return (static_cast<std::uint64_t>(c1) << 32) | c0;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  std::uint32_t key0_, key1_;
  std::uint32_t stream_lo_, stream_hi_;
  std::uint64_t block_ = 0;
  std::uint64_t buffered_ = 0;
  bool have_buffered_ = false;
};

using Rng = Philox4x32;

inline Rng substream(std::uint64_t master_seed, std::uint64_t replicate) noexcept {
  return Rng(master_seed, replicate);
}

// Derives an independent master seed for an auxiliary estimator (splitmix64
// step), so nested Monte Carlo runs never share substreams with the caller.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t tag) noexcept {
  std::uint64_t z = master_seed + (tag + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace fbmq
