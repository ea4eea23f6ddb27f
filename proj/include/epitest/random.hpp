#pragma once

#include <cstdint>

namespace epitest {

/// SplitMix64 generator.
///
/// state += 0x9E3779B97F4A7C15; z = state;
/// z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
/// z = (z ^ (z >> 27)) * 0x94D049BB133111EB;
/// return z ^ (z >> 31);
///
/// Uniform doubles take the top 53 bits: (next() >> 11) * 2^-53. The stream
/// is fully determined by the seed, which keeps fixtures reproducible in
/// any language.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();
    /// Uniform on [0, 1).
    double uniform();
    /// Uniform integer on [0, n).
    std::uint64_t below(std::uint64_t n);
    /// Poisson variate: sequential inversion for mean < 30, Hormann's
    /// transformed rejection (PTRS) otherwise.
    std::int64_t poisson(double mean);
    /// Independent stream derived from this one.
    Rng split();

private:
    std::uint64_t state_;
};

} // namespace epitest
