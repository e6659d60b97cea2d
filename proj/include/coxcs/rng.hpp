#pragma once

#include <cstdint>

namespace coxcs {

/// SplitMix64 finalizer; a bijective 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/**
 * Counter-based generator: the k-th output is mix64(key + k * golden_gamma).
 * Streams for different (seed, stream id) pairs are derived by mixing, so a
 * replicate can be regenerated on its own without replaying earlier ones.
 *
 * Normal variates use the inverse normal CDF of one uniform draw each.
 */
class Rng
{
public:
    explicit Rng(std::uint64_t key) noexcept : key_(key) {}

    static Rng stream(std::uint64_t seed, std::uint64_t stream_id) noexcept
    {
        return Rng(mix64(seed ^ mix64(stream_id + 0x5851F42D4C957F2DULL)));
    }

    std::uint64_t key() const noexcept { return key_; }

    std::uint64_t next() noexcept
    {
        counter_ += 0x9E3779B97F4A7C15ULL;
        return mix64(key_ + counter_);
    }

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    double normal();

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Standard normal quantile function.
double normal_quantile(double u);

} // namespace coxcs
