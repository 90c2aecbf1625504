#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "relent/errors.hpp"

namespace relent {

// Every stochastic operation in the library takes an explicit 64-bit seed and
// draws from a Mersenne Twister (mt19937_64), whose output stream is fixed by
// the standard, so runs are reproducible across platforms.  Uniform doubles
// are built from the top 53 bits directly rather than through
// std::uniform_real_distribution, whose mapping is implementation-defined.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // uniform in [0, 1)
    double uniform() { return (engine_() >> 11) * 0x1.0p-53; }

    std::uint64_t bits() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

// splitmix64: mixes a seed and a stream index into an independent-looking
// stream seed.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Inverse-CDF sampling from a fixed probability vector, in index order.
class CategoricalSampler {
  public:
    explicit CategoricalSampler(const std::vector<double>& probs) : cdf_(probs) {
        if (cdf_.empty()) throw invalid_input("CategoricalSampler: empty distribution");
        double acc = 0.0;
        for (double& c : cdf_) {
            acc += c;
            c = acc;
        }
        cdf_.back() = 1.0;  // guard against rounding shortfall
    }

    std::size_t operator()(Rng& rng) const {
        double u = rng.uniform();
        std::size_t lo = 0, hi = cdf_.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (u < cdf_[mid]) hi = mid; else lo = mid + 1;
        }
        return lo;
    }

  private:
    std::vector<double> cdf_;
};

}  // namespace relent
