#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace pgdsdn {

/// SplitMix64 finalizer; used to derive independent sub-seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for the `index`-th draw of an independent stream named `tag`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::string_view tag) noexcept;

/// mt19937_64 with platform-independent real conversions.
///
/// std::uniform_real_distribution is implementation-defined, so the
/// conversion to doubles is done here to keep outputs byte-stable.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Uniform on [lo, hi].
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Standard normal (Box-Muller, no cached second draw).
    double normal();

private:
    std::mt19937_64 engine_;
};

}  // namespace pgdsdn
