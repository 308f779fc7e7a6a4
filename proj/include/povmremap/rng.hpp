#pragma once

#include <cmath>
#include <cstdint>

namespace povmremap {

/// Counter-based deterministic generator built on SplitMix64
/// (Steele, Lea & Flood 2014). Stream n for seed s is
/// splitmix64_mix(s + (n+1) * 0x9E3779B97F4A7C15), so draws are
/// addressable by index and reproducible across platforms and languages.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t bits(std::uint64_t counter) const {
        std::uint64_t z = seed_ + (counter + 1) * UINT64_C(0x9E3779B97F4A7C15);
        z = (z ^ (z >> 30)) * UINT64_C(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)) * UINT64_C(0x94D049BB133111EB);
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    /// Uniform double in (0, 1]; safe as a log() argument.
    double uniform_open(std::uint64_t counter) const {
        return static_cast<double>((bits(counter) >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller from draws (counter, counter+1).
    double normal(std::uint64_t counter) const {
        const double u1 = uniform_open(counter);
        const double u2 = uniform(counter + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    std::uint64_t seed_;
};

} // namespace povmremap
