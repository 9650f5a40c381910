#ifndef OAPSIM_RNG_HPP
#define OAPSIM_RNG_HPP

#include <cstdint>
#include <string_view>

namespace oapsim {

// Deterministic splittable random stream. All randomness in the simulator
// flows through named streams derived from (root_seed, replicate, label),
// so adding a new consumer never perturbs existing draws.
//
// Core generator is splitmix64: portable, stateless seeding, good enough
// statistical quality for simulation draws.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    static Rng derive(std::uint64_t root_seed, std::uint64_t replicate,
                      std::string_view label);

    std::uint64_t next_u64();

    // Uniform in [0, bound). bound must be > 0.
    std::uint64_t uniform(std::uint64_t bound);

    // Uniform double in [0, 1).
    double uniform01();

    bool bernoulli(double p);

private:
    std::uint64_t state_;
};

} // namespace oapsim

#endif
