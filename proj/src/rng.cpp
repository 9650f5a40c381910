#include "oapsim/rng.hpp"

namespace oapsim {

namespace {

std::uint64_t splitmix64(std::uint64_t& s) {
    s += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

} // namespace

Rng Rng::derive(std::uint64_t root_seed, std::uint64_t replicate,
                std::string_view label) {
    std::uint64_t s = root_seed;
    splitmix64(s);
    s ^= 0xA5A5A5A5DEADBEEFULL + replicate;
    splitmix64(s);
    s ^= fnv1a(label);
    // Burn one output so distinct labels diverge immediately.
    std::uint64_t seed = splitmix64(s);
    return Rng(seed);
}

std::uint64_t Rng::next_u64() { return splitmix64(state_); }

std::uint64_t Rng::uniform(std::uint64_t bound) {
    // Rejection sampling to avoid modulo bias.
    std::uint64_t threshold = -bound % bound;
    for (;;) {
        std::uint64_t r = next_u64();
        if (r >= threshold) return r % bound;
    }
}

double Rng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

bool Rng::bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform01() < p;
}

} // namespace oapsim
