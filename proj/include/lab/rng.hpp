#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace lab {

// Identifies a reproducible random stream: a master seed plus a stream id.
// Streams with distinct ids occupy disjoint regions of the Philox counter
// space, so they are statistically independent and can be consumed from
// different threads without coordination.
struct RngSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    // Derive a named substream. Stable: sub(a).sub(b) depends only on
    // (seed, stream, a, b).
    [[nodiscard]] RngSpec sub(std::uint64_t tag) const;
};

namespace detail {

// Philox4x32-10 counter-based generator (Salmon et al., 2011).
// 128-bit counter = (block_lo, block_hi, stream_lo, stream_hi), 64-bit key.
struct Philox4x32 {
    static std::array<std::uint32_t, 4> block(std::uint64_t key,
                                              std::uint64_t block_index,
                                              std::uint64_t stream);
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace detail

// Sequential view over a counter-based stream. Cheap to construct; holds a
// few words of state. Copying forks the exact position.
class RngStream {
  public:
    explicit RngStream(RngSpec spec) : spec_(spec) {}

    std::uint64_t next_u64();

    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    // Uniform on (0, 1]; safe as a log() argument.
    double uniform_pos();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; generates pairs, caches the second.
    double normal();

    RngSpec spec() const { return spec_; }

  private:
    RngSpec spec_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int buf_pos_ = 4;  // 32-bit lanes consumed from buf_
    double cached_normal_ = 0.0;
    bool have_cached_normal_ = false;

    std::uint32_t next_u32();
};

}  // namespace lab
