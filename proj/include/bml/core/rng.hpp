#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string_view>

namespace bml {

// =============================================================================
// Counter-based random streams
// =============================================================================
//
// Philox4x32-10 keyed by the 64-bit seed; the 128-bit counter carries the
// stream id in its upper half and a block index in its lower half. Two streams
// with equal (seed, stream_id) produce identical sequences on every platform,
// so replicas can be scheduled on any thread in any order.
//
// The distribution helpers below are hand-written rather than taken from
// <random>: the standard distributions are implementation-defined and would
// break byte-identical outputs across toolchains.

namespace detail {

struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static constexpr Counter apply(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char ch : s) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace detail

/// A reproducible random stream. Satisfies UniformRandomBitGenerator.
/// Single consumer: share the (seed, stream_id) pair, not the object.
class RngStream {
public:
    using result_type = std::uint64_t;

    constexpr RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : seed_(seed), stream_id_(stream_id) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    [[nodiscard]] constexpr std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] constexpr std::uint64_t stream_id() const noexcept { return stream_id_; }

    result_type operator()() noexcept {
        if (buffered_ == 0) refill();
        return buffer_[--buffered_];
    }

    /// Uniform on [0, 1).
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0, 1).
    double uniform_open() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Unbiased integer in [0, bound). bound must be positive.
    std::uint64_t uniform_index(std::uint64_t bound) noexcept {
        // Lemire's nearly-divisionless rejection.
        std::uint64_t x = (*this)();
        __uint128_t m = static_cast<__uint128_t>(x) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                x = (*this)();
                m = static_cast<__uint128_t>(x) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Standard normal via Box-Muller; the paired value is cached.
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_open()));
        const double theta = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// Exponential with unit mean.
    double exponential() noexcept { return -std::log(uniform_open()); }

    /// Derived stream that does not overlap this one; use for nested fan-out.
    [[nodiscard]] RngStream split(std::uint64_t child) const noexcept {
        return RngStream(seed_, detail::splitmix64(stream_id_ ^ detail::splitmix64(child + 1)));
    }

private:
    void refill() noexcept {
        const detail::Philox4x32::Counter ctr{
            static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
            static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
        const detail::Philox4x32::Key key{static_cast<std::uint32_t>(seed_),
                                          static_cast<std::uint32_t>(seed_ >> 32)};
        const auto out = detail::Philox4x32::apply(ctr, key);
        ++block_;
        // Popped from the back, so store in reverse to emit in natural order.
        buffer_[1] = (std::uint64_t{out[1]} << 32) | out[0];
        buffer_[0] = (std::uint64_t{out[3]} << 32) | out[2];
        buffered_ = 2;
    }

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int buffered_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Stream for replica `replica` of the experiment called `experiment`.
inline RngStream derive_stream(std::uint64_t seed, std::string_view experiment, std::uint64_t replica) {
    const std::uint64_t base = detail::fnv1a64(experiment);
    return RngStream(seed, detail::splitmix64(base ^ detail::splitmix64(replica + 0x632BE59BD9B4E019ull)));
}

}  // namespace bml
