#ifndef TLP_RNG_HPP_
#define TLP_RNG_HPP_

#include <cstdint>

namespace tlp {

// Deterministic xoshiro256++ generator seeded through splitmix64.
// Same seed gives the same draw sequence on every platform; there is no
// global generator, every consumer owns or borrows an explicit Rng.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform draw in [0, 1) with 53 bits of mantissa.
    double next_double();

    // Uniform draw in [lo, hi).
    double next_uniform(double lo, double hi);

    // Independent child stream; deterministic in (seed, stream) and
    // unaffected by how many draws the parent has made.
    Rng split(std::uint64_t stream) const;

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t state_[4];
};

}  // namespace tlp

#endif  // TLP_RNG_HPP_
