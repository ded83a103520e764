#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace qdistil {

// Philox4x32-10 counter-based generator.  A (seed, stream) pair fully
// determines the draw sequence, so independent streams for parallel
// replications are just distinct stream indices.  The 128-bit counter is
// laid out as (block_lo, block_hi, stream_lo, stream_hi); the key is the
// 64-bit seed.
class Philox {
public:
    using result_type = std::uint32_t;

    explicit Philox(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed),
          stream_(stream),
          key_{static_cast<std::uint32_t>(seed),
               static_cast<std::uint32_t>(seed >> 32)},
          ctr_{0, 0, static_cast<std::uint32_t>(stream),
               static_cast<std::uint32_t>(stream >> 32)} {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() {
        if (idx_ == 4) {
            block_ = round10(ctr_, key_);
            advance_counter();
            idx_ = 0;
        }
        return block_[idx_++];
    }

    // IEEE double in [0, 1) from 53 uniform bits.
    double uniform() {
        const std::uint64_t hi = (*this)();
        const std::uint64_t lo = (*this)();
        return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
    }

    // Raw block function, exposed for known-answer tests.
    static std::array<std::uint32_t, 4> round10(std::array<std::uint32_t, 4> c,
                                                std::array<std::uint32_t, 2> k) {
        for (int r = 0; r < 10; ++r) {
            const auto p0 = mulhilo(kM0, c[0]);
            const auto p1 = mulhilo(kM1, c[2]);
            c = {p1.first ^ c[1] ^ k[0], p1.second, p0.first ^ c[3] ^ k[1],
                 p0.second};
            k[0] += kW0;
            k[1] += kW1;
        }
        return c;
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;

    static std::pair<std::uint32_t, std::uint32_t> mulhilo(std::uint32_t a,
                                                           std::uint32_t b) {
        const std::uint64_t p =
            static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b);
        return {static_cast<std::uint32_t>(p >> 32),
                static_cast<std::uint32_t>(p)};
    }

    void advance_counter() {
        if (++ctr_[0] == 0) ++ctr_[1];  // stream words stay fixed
    }

    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> ctr_;
    std::array<std::uint32_t, 4> block_{};
    int idx_ = 4;
};

// Deterministic stream id from structural indices, for nested replications.
inline std::uint64_t substream(std::uint64_t a, std::uint64_t b = 0,
                               std::uint64_t c = 0) {
    std::uint64_t h = 0x9E3779B97F4A7C15ull;
    for (std::uint64_t x : {a, b, c}) {
        h ^= x + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
        h *= 0xBF58476D1CE4E5B9ull;
        h ^= h >> 31;
    }
    return h;
}

}  // namespace qdistil
