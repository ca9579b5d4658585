#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace star {

// Deterministic RNG used everywhere in the pipeline. All randomness flows
// from one root seed, split per stage/item by stable string labels, so the
// output is independent of thread schedule and platform. std::shuffle and
// std::uniform_int_distribution are implementation-defined, so the draws
// here are hand-rolled.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next();

    // Uniform in [0, n). n must be > 0.
    uint64_t below(uint64_t n);

    // Uniform double in [0, 1) with 53 bits of entropy.
    double unit();

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[static_cast<size_t>(below(v.size()))];
    }

private:
    uint64_t state_;
};

// FNV-1a 64-bit hash of a label string.
uint64_t hash_label(const std::string& label);

// Derives an independent child seed from (seed, label). Stable across runs.
uint64_t derive_seed(uint64_t seed, const std::string& label);

}  // namespace star
