#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace mclab {

/// Philox4x32-10 counter-based generator. Each (counter, key) pair maps to
/// four independent 32-bit words, so streams never need to share state:
/// the key carries the seed and the counter carries (block, stream id).
struct Philox4x32 {
    static constexpr uint32_t M0 = 0xD2511F53u;
    static constexpr uint32_t M1 = 0xCD9E8D57u;
    static constexpr uint32_t W0 = 0x9E3779B9u;
    static constexpr uint32_t W1 = 0xBB67AE85u;

    static std::array<uint32_t, 4> block(std::array<uint32_t, 4> c,
                                         std::array<uint32_t, 2> k) {
        for (int round = 0; round < 10; ++round) {
            const uint64_t p0 = uint64_t(M0) * c[0];
            const uint64_t p1 = uint64_t(M1) * c[2];
            const uint32_t hi0 = uint32_t(p0 >> 32), lo0 = uint32_t(p0);
            const uint32_t hi1 = uint64_t(p1) >> 32, lo1 = uint32_t(p1);
            c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
            k[0] += W0;
            k[1] += W1;
        }
        return c;
    }
};

/// Deterministic random stream addressed by (seed, stream_id). Streams with
/// distinct ids are independent byte-for-byte regardless of draw order in
/// other streams, which is what makes parallel trials replayable.
class RngStream {
  public:
    explicit RngStream(uint64_t seed, uint64_t stream_id = 0)
        : key_{uint32_t(seed), uint32_t(seed >> 32)},
          stream_hi_{uint32_t(stream_id), uint32_t(stream_id >> 32)} {}

    uint32_t next_u32() {
        if (pos_ == 4) refill();
        return buf_[pos_++];
    }

    uint64_t next_u64() {
        const uint64_t lo = next_u32();
        return lo | (uint64_t(next_u32()) << 32);
    }

    /// Uniform double in [0, 1) with 53 significant bits.
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Unbiased integer in [0, n) by rejection.
    uint64_t uniform_index(uint64_t n) {
        if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
        const uint64_t max = std::numeric_limits<uint64_t>::max();
        const uint64_t excess = (max % n + 1) % n;
        uint64_t u = next_u64();
        if (excess != 0) {
            const uint64_t cutoff = max - excess + 1;  // == 2^64 - excess
            while (u >= cutoff) u = next_u64();
        }
        return u % n;
    }

    /// Standard normal via Box-Muller; the second value of each pair is cached.
    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        // 1 - uniform() keeps the log argument strictly positive
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 6.283185307179586476925286766559 * u2;
        cached_ = rad * std::sin(ang);
        have_cached_ = true;
        return rad * std::cos(ang);
    }

  private:
    void refill() {
        buf_ = Philox4x32::block(
            {uint32_t(block_), uint32_t(block_ >> 32), stream_hi_[0], stream_hi_[1]},
            key_);
        ++block_;
        pos_ = 0;
    }

    std::array<uint32_t, 2> key_;
    std::array<uint32_t, 2> stream_hi_;
    uint64_t block_ = 0;
    std::array<uint32_t, 4> buf_{};
    int pos_ = 4;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace mclab
