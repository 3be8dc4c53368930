#pragma once

#include <cstdint>
#include <random>

namespace densekit {

/// Seeded 64-bit generator with platform-independent sampling.
///
/// The standard distributions are implementation-defined, so draws are mapped
/// from raw engine output here to keep results byte-stable across toolchains.
/// Independent streams are derived from a (seed, index) pair, which lets
/// parallel trials reproduce regardless of scheduling.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed);

    /// Stream `index` of the family identified by `seed`.
    static Rng stream(std::uint64_t seed, std::uint64_t index);

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform01();

    /// Uniform on [lo, hi]; returns lo when the interval is degenerate.
    double uniform(double lo, double hi);

    /// Uniform integer on [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);

    // UniformRandomBitGenerator, so std::shuffle et al. accept an Rng.
    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace densekit
