#pragma once

#include <cstdint>

namespace condsweep {

/// Deterministic random stream shared by every stochastic operation.
///
/// The stream is fully specified so that golden files can be regenerated by
/// any implementation:
///   - next_u64(): splitmix64. The state starts at the seed; each call adds
///     0x9E3779B97F4A7C15 and returns the splitmix64 finalizer of the state.
///   - uniform(): (next_u64() >> 11) * 2^-53, in [0, 1).
///   - gaussian(): Box-Muller on a pair (u1 = 1 - uniform(), u2 = uniform()),
///     r = sqrt(-2 ln u1). The call returns r*cos(2 pi u2) and caches
///     r*sin(2 pi u2) for the next call.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t next_u64();
    double uniform();
    double gaussian();

    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// Derives an independent seed for sub-stream `index` (e.g. one per dataset item).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace condsweep
