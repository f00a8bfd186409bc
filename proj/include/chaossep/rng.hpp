#ifndef CHAOSSEP_RNG_HPP
#define CHAOSSEP_RNG_HPP

#include <cstdint>
#include <random>

namespace chaossep {

/// Deterministic RNG wrapper. mt19937_64 output is fully specified by the
/// standard, and the uniform mapping below avoids distribution objects whose
/// results may differ between standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return gen_() % n; }

private:
    std::mt19937_64 gen_;
};

}  // namespace chaossep

#endif
