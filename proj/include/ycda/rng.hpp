#ifndef YCDA_RNG_HPP
#define YCDA_RNG_HPP

#include <cstdint>
#include <random>

namespace ycda {

/// Seeded generator with a portable uniform mapping (raw 64-bit draws
/// mapped to doubles directly), so identical seeds give bit-identical
/// streams regardless of standard-library distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0,1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

private:
    std::mt19937_64 engine_;
};

}  // namespace ycda

#endif  // YCDA_RNG_HPP
