#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace skewlab {

// mt19937_64-backed generator. The raw stream is fixed by the standard and
// all derived draws below avoid std::*_distribution, whose output is
// implementation-defined, so equal seeds give bit-identical results on any
// conforming platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t raw() { return eng_(); }

    /// Uniform double in [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Index into a nonnegative weight vector summing to ~1, by CDF walk.
    std::size_t discrete(const std::vector<double>& weights) {
        if (weights.empty())
            throw std::invalid_argument("Rng::discrete: empty weight vector");
        const double u = uniform();
        double acc = 0.0;
        for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
            acc += weights[k];
            if (u < acc) return k;
        }
        return weights.size() - 1;
    }

    bool coin() { return (eng_() & 1u) != 0; }

    // splitmix64 mix of (seed, stream): used to hand independent seeds to
    // parallel samplers without overlapping the base stream.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 eng_;
};

} // namespace skewlab
