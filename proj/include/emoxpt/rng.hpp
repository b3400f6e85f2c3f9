#ifndef EMOXPT_RNG_HPP
#define EMOXPT_RNG_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace emoxpt {

// The std:: distributions are implementation-defined, so every conversion
// from raw engine output to a variate lives here. The engine sequence itself
// (mt19937_64) is fully specified by the standard.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform index in [0, n); n must be positive.
    std::size_t index(std::size_t n) {
        auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

    /// Standard normal via Box-Muller (one variate per call).
    double normal();

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// 64-bit FNV-1a over the bytes of `s`.
std::uint64_t fnv1a64(std::string_view s) noexcept;

/// Seed for a stream keyed on (seed, key): independent streams per key.
std::uint64_t keyed_seed(std::uint64_t seed, std::string_view key) noexcept;

}  // namespace emoxpt

#endif  // EMOXPT_RNG_HPP
