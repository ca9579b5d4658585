#pragma once

#include <string>
#include <vector>

#include "star/hypergraph.hpp"
#include "star/qagen.hpp"
#include "star/rng.hpp"
#include "star/synth.hpp"
#include "star/vocabulary.hpp"

namespace star::testing {

inline const Vocabulary& default_vocabulary() {
    static const Vocabulary voc = load_vocabulary_file(std::string(STAR_DATA_DIR) + "/vocabulary.json");
    return voc;
}

inline const std::vector<QuestionTemplate>& default_templates() {
    static const std::vector<QuestionTemplate> templates =
        load_templates_file(std::string(STAR_DATA_DIR) + "/templates.json");
    return templates;
}

struct ActionSpec {
    std::string verb;
    std::string object;
    int start;
    int end;
};

// Builds a situation whose frames sample every action boundary; every
// mentioned object gets a node present in all frames.
inline SituationHypergraph make_graph(const std::string& id, const std::vector<ActionSpec>& specs,
                                      const std::vector<RelationTriplet>& static_triplets = {}) {
    const Vocabulary& voc = default_vocabulary();
    std::set<int> frame_indices{0};
    std::set<std::string> classes;
    std::vector<ActionAnnotation> annotations;
    for (size_t i = 0; i < specs.size(); ++i) {
        const auto& s = specs[i];
        annotations.push_back({"a" + std::to_string(i), s.verb, s.object, s.start, s.end});
        frame_indices.insert(s.start);
        frame_indices.insert(s.end);
        classes.insert(s.object);
    }
    std::vector<EntityNode> entities{{"person", NodeKind::Person, kPersonClass}};
    for (const auto& t : static_triplets) {
        for (const auto& endpoint : {t.subject, t.object}) {
            if (endpoint == "person") continue;
            std::string cls = endpoint.rfind("n_", 0) == 0 ? endpoint.substr(2) : endpoint;
            classes.insert(cls);
        }
    }
    for (const auto& cls : classes) entities.push_back({"n_" + cls, NodeKind::Object, cls});

    std::vector<FrameSubgraph> frames;
    for (int fi : frame_indices) {
        FrameSubgraph f;
        f.frame = fi;
        for (const auto& e : entities) f.nodes.insert(e.id);
        for (RelationTriplet t : static_triplets) {
            t.frame = fi;
            f.triplets.insert(t);
        }
        frames.push_back(std::move(f));
    }
    return build_hypergraph(id, entities, frames, annotations, voc);
}

// Three disjoint actions a0 < a1 < a2 with distinct predicates.
inline SituationHypergraph chain3() {
    return make_graph("chain3", {{"take", "cup", 0, 9}, {"put_down", "book", 12, 21}, {"open", "door", 24, 35}});
}

// Small random graphs for property and cross-implementation tests.
inline std::vector<SituationHypergraph> random_graphs(int n, uint64_t seed, int max_actions = 6) {
    SynthConfig cfg;
    cfg.situations = n;
    cfg.min_actions = 1;
    cfg.max_actions = max_actions;
    cfg.seed = seed;
    return synthesize_corpus(default_vocabulary(), cfg);
}

}  // namespace star::testing
