#include "condsweep/rng.hpp"

#include <cmath>
#include <numbers>

namespace condsweep {

namespace {

std::uint64_t splitmix_finalize(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t SeededRng::next_u64()
{
    state_ += 0x9E3779B97F4A7C15ULL;
    return splitmix_finalize(state_);
}

double SeededRng::uniform()
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededRng::gaussian()
{
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index)
{
    return splitmix_finalize(seed ^ splitmix_finalize(index + 0x9E3779B97F4A7C15ULL));
}

}  // namespace condsweep
