#pragma once

#include <cstdint>
#include <vector>

#include "star/hypergraph.hpp"
#include "star/vocabulary.hpp"

namespace star {

// Sample-corpus synthesizer: seeded, deterministic daily-activity
// situations used by the pipeline demos, the test suites and the
// acceptance runs. Action predicates are drawn with a Zipf-like skew so
// the raw corpus carries the frequency bias the debiasing stage is meant
// to remove.
struct SynthConfig {
    int situations = 800;
    int min_actions = 1;
    int max_actions = 6;
    uint64_t seed = 7;
};

std::vector<SituationHypergraph> synthesize_corpus(const Vocabulary& voc, const SynthConfig& cfg);

}  // namespace star
