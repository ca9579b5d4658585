#include "star/synth.hpp"

#include <algorithm>
#include <map>

#include "star/rng.hpp"

namespace star {

namespace {

// Plausible in-frame contact for an ongoing action's verb.
std::string contact_for(const std::string& verb) {
    static const std::map<std::string, std::string> table = {
        {"take", "holding"},     {"put_down", "holding"}, {"hold", "holding"},
        {"grasp", "holding"},    {"carry", "carrying"},   {"throw", "holding"},
        {"eat", "holding"},      {"drink_from", "holding"}, {"pour", "holding"},
        {"sit_on", "sitting_on"}, {"lie_on", "lying_on"}, {"stand_on", "standing_on"},
        {"wear", "wearing"},     {"snuggle", "holding"},
    };
    auto it = table.find(verb);
    return it == table.end() ? "touching" : it->second;
}

const std::vector<std::string>& layout_relations() {
    static const std::vector<std::string> rels = {"on",          "beside",          "near",
                                                  "in_front_of", "on_the_left_of",  "on_the_right_of",
                                                  "behind",      "above"};
    return rels;
}

// Integer cumulative weights for a Zipf-like skew over ranks.
std::vector<uint64_t> zipf_cumulative(size_t n) {
    std::vector<uint64_t> cum(n);
    uint64_t total = 0;
    for (size_t i = 0; i < n; ++i) {
        total += 100000 / (i + 1);
        cum[i] = total;
    }
    return cum;
}

size_t zipf_pick(Rng& rng, const std::vector<uint64_t>& cum) {
    uint64_t r = rng.below(cum.back());
    return static_cast<size_t>(std::lower_bound(cum.begin(), cum.end(), r + 1) - cum.begin());
}

std::string pad4(int n) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d", n);
    return buf;
}

}  // namespace

std::vector<SituationHypergraph> synthesize_corpus(const Vocabulary& voc, const SynthConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> predicates(voc.action_predicates.begin(),
                                                                voc.action_predicates.end());
    std::vector<uint64_t> cum = zipf_cumulative(predicates.size());
    std::vector<std::string> anchor_pool;
    for (const std::string cand : {"table", "sofa", "floor", "chair", "door"})
        if (voc.is_object(cand)) anchor_pool.push_back(cand);

    std::vector<SituationHypergraph> corpus;
    for (int s = 0; s < cfg.situations; ++s) {
        std::string sid = "s" + pad4(s);
        Rng rng(derive_seed(cfg.seed, "synth." + sid));

        int span = cfg.max_actions - cfg.min_actions;
        int n_actions = cfg.min_actions + (span > 0 ? static_cast<int>(rng.below(span + 1)) : 0);
        // Single-action situations stay rare but present; they exercise the
        // distractor fallback path.
        if (n_actions == cfg.min_actions && cfg.min_actions < 2 && rng.below(100) < 60)
            n_actions = std::min(cfg.max_actions, 2 + static_cast<int>(rng.below(2)));

        // Distinct predicates keep question anchors unambiguous.
        std::vector<std::pair<std::string, std::string>> chosen;
        for (int tries = 0; tries < 60 && static_cast<int>(chosen.size()) < n_actions; ++tries) {
            auto pred = predicates[zipf_pick(rng, cum)];
            if (std::find(chosen.begin(), chosen.end(), pred) == chosen.end()) chosen.push_back(pred);
        }

        std::vector<ActionAnnotation> annotations;
        int prev_start = 0, prev_end = -3;
        for (size_t k = 0; k < chosen.size(); ++k) {
            int len = 4 + static_cast<int>(rng.below(28));
            int start;
            if (k == 0) {
                start = 0;
            } else if (prev_end - prev_start > 2 && rng.below(100) < 30) {
                // Overlap the previous action part-way through.
                start = prev_start + 1 + static_cast<int>(rng.below(prev_end - prev_start - 1));
            } else {
                start = prev_end + 2 + static_cast<int>(rng.below(6));
            }
            ActionAnnotation ann;
            ann.id = "a" + std::to_string(k);
            ann.verb = chosen[k].first;
            ann.object = chosen[k].second;
            ann.start = start;
            ann.end = start + len - 1;
            annotations.push_back(ann);
            prev_start = ann.start;
            prev_end = ann.end;
        }
        std::sort(annotations.begin(), annotations.end(),
                  [](const ActionAnnotation& a, const ActionAnnotation& b) {
                      return std::tie(a.start, a.end, a.id) < std::tie(b.start, b.end, b.id);
                  });

        // Frame samples: every action boundary plus a midpoint for longer
        // actions.
        std::set<int> frame_indices{0};
        for (const auto& a : annotations) {
            frame_indices.insert(a.start);
            frame_indices.insert(a.end);
            if (a.end - a.start >= 6) frame_indices.insert(a.start + (a.end - a.start) / 2);
        }

        // One node per object class plus a scene anchor or two.
        std::set<std::string> classes;
        for (const auto& a : annotations) classes.insert(a.object);
        int extra = 1 + static_cast<int>(rng.below(2));
        for (int e = 0; e < extra && !anchor_pool.empty(); ++e)
            classes.insert(anchor_pool[static_cast<size_t>(rng.below(anchor_pool.size()))]);

        std::vector<EntityNode> entities;
        entities.push_back({"person", NodeKind::Person, kPersonClass});
        for (const auto& cls : classes) entities.push_back({"n_" + cls, NodeKind::Object, cls});

        // Static layout: each non-anchor object sits in some spatial
        // relation to an anchor for the whole situation.
        std::vector<RelationTriplet> layout;
        std::vector<std::string> anchors;
        for (const auto& cls : classes)
            if (std::find(anchor_pool.begin(), anchor_pool.end(), cls) != anchor_pool.end())
                anchors.push_back("n_" + cls);
        for (const auto& cls : classes) {
            std::string node = "n_" + cls;
            if (anchors.empty()) break;
            std::string anchor = anchors[static_cast<size_t>(rng.below(anchors.size()))];
            if (anchor == node) continue;
            const auto& rels = layout_relations();
            layout.push_back({node, rels[static_cast<size_t>(rng.below(rels.size()))], anchor, 0});
        }

        std::vector<FrameSubgraph> frames;
        for (int fi : frame_indices) {
            FrameSubgraph f;
            f.frame = fi;
            for (const auto& e : entities) f.nodes.insert(e.id);
            for (RelationTriplet t : layout) {
                t.frame = fi;
                f.triplets.insert(t);
            }
            for (const auto& a : annotations) {
                if (fi < a.start || fi > a.end) continue;
                f.triplets.insert({"person", contact_for(a.verb), "n_" + a.object, fi});
            }
            frames.push_back(std::move(f));
        }

        corpus.push_back(build_hypergraph(sid, entities, frames, annotations, voc));
    }
    return corpus;
}

}  // namespace star
