#pragma once

#include <array>
#include <cstdint>

namespace specreg {

/// Stream tags keep independent consumers of one experiment seed apart.
enum class Stream : std::uint32_t {
    noise = 1,
    data = 2,
    phantom = 3,
    perturbation = 4,
    test_vector = 5,
    user = 100,
};

/// Counter-based generator: Philox4x32-10 keyed by the 64-bit seed.
///
/// The 128-bit counter is (block, index_lo, index_hi, stream), so draw `index`
/// of stream `s` under seed `k` is a pure function of (k, s, index). Monte-Carlo
/// loops derive one generator per draw and stay independent of scheduling.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, Stream stream, std::uint64_t index = 0) noexcept
        : CounterRng(seed, static_cast<std::uint32_t>(stream), index) {}
    CounterRng(std::uint64_t seed, std::uint32_t stream, std::uint64_t index = 0) noexcept;

    std::uint32_t next_u32() noexcept;
    std::uint64_t next_u64() noexcept;
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    /// Uniform integer on [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) noexcept;
    /// Standard normal via Box-Muller; the second variate is cached.
    double gaussian() noexcept;

    /// One Philox4x32-10 block, exposed for known-answer tests.
    static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> counter,
                                               std::array<std::uint32_t, 2> key) noexcept;

private:
    void refill() noexcept;

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> counter_;
    std::array<std::uint32_t, 4> buffer_{};
    unsigned buffered_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace specreg
