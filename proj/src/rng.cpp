#include "star/rng.hpp"

namespace star {

namespace {

uint64_t splitmix64(uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

uint64_t Rng::next() { return splitmix64(state_); }

uint64_t Rng::below(uint64_t n) {
    // Modulo with rejection of the biased tail.
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v = next();
    while (v >= limit) v = next();
    return v % n;
}

double Rng::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

uint64_t hash_label(const std::string& label) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

uint64_t derive_seed(uint64_t seed, const std::string& label) {
    uint64_t x = seed ^ hash_label(label);
    return splitmix64(x);
}

}  // namespace star
