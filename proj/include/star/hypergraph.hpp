#pragma once

#include <set>
#include <string>
#include <vector>

#include "star/vocabulary.hpp"

namespace star {

inline const std::string kPersonClass = "person";

enum class NodeKind { Person, Object };

struct EntityNode {
    std::string id;
    NodeKind kind = NodeKind::Object;
    std::string cls;  // object class, or "person"

    bool operator==(const EntityNode&) const = default;
    bool operator<(const EntityNode& other) const { return id < other.id; }
};

// One in-frame relation edge. `frame` duplicates the owning frame index so
// triplets can travel standalone inside executor values.
struct RelationTriplet {
    std::string subject;
    std::string predicate;
    std::string object;
    int frame = 0;

    bool operator==(const RelationTriplet&) const = default;
    auto operator<=>(const RelationTriplet&) const = default;
};

struct FrameSubgraph {
    int frame = 0;
    std::set<std::string> nodes;
    std::set<RelationTriplet> triplets;

    bool operator==(const FrameSubgraph&) const = default;
};

// One action instance: a verb-object predicate over an inclusive frame
// interval. The first frame is the precondition (initial static scene);
// the member frames after it are the effect segment.
struct ActionHyperedge {
    std::string id;
    std::string verb;
    std::string object;
    int start = 0;
    int end = 0;
    int precondition_frame = 0;
    std::vector<int> effect_frames;

    int length() const { return end - start + 1; }
    bool covers(int frame) const { return frame >= start && frame <= end; }

    bool operator==(const ActionHyperedge&) const = default;
};

struct SituationHypergraph {
    std::string id;
    std::pair<int, int> source_interval{0, 0};
    std::vector<EntityNode> entities;     // sorted by id
    std::vector<FrameSubgraph> frames;    // sorted by frame index, strictly increasing
    std::vector<ActionHyperedge> actions; // sorted by (start, end, id)

    const EntityNode* find_entity(const std::string& node_id) const;
    const ActionHyperedge* find_action(const std::string& action_id) const;
    const FrameSubgraph* find_frame(int frame) const;

    // Frames in which the node appears.
    std::set<int> frame_span(const std::string& node_id) const;

    bool operator==(const SituationHypergraph&) const = default;
};

struct Violation {
    std::string code;
    std::string message;

    bool operator==(const Violation&) const = default;
};

// Raw action annotation used as build input.
struct ActionAnnotation {
    std::string id;
    std::string verb;
    std::string object;
    int start = 0;
    int end = 0;
};

// Declarative relation-propagation rules: <A r1 B> and <B r2 C> imply
// <A r2 C> whenever r1 is one of the contact predicates and r2 is spatial.
struct PropagationRules {
    std::vector<std::string> contact_predicates;
};

PropagationRules default_propagation_rules();
PropagationRules load_propagation_rules(const std::string& json_text);
PropagationRules load_propagation_rules_file(const std::string& path);

// Assembles a hypergraph from the entity catalog, per-frame subgraphs and
// action annotations. Throws ValidationError on unsorted frames, inverted
// or out-of-range intervals, and predicates absent from the vocabulary.
SituationHypergraph build_hypergraph(const std::string& id,
                                     std::vector<EntityNode> entities,
                                     std::vector<FrameSubgraph> frames,
                                     const std::vector<ActionAnnotation>& annotations,
                                     const Vocabulary& voc);

// Per-frame fixpoint closure under the propagation rules. Monotone
// (output triplets contain the input's) and idempotent. Rules that would
// create self-loops are skipped.
SituationHypergraph propagate_relations(const SituationHypergraph& graph,
                                        const Vocabulary& voc,
                                        const PropagationRules& rules);

// Restricts the graph to `window` (inclusive). Hyperedges are clipped to
// the window and dropped when nothing of them remains; a clipped hyperedge
// is re-anchored on its first surviving member frame. Throws
// ValidationError("empty situation") when no frame survives.
SituationHypergraph trim(const SituationHypergraph& graph, std::pair<int, int> window);

int prediction_cutoff(const ActionHyperedge& action);

// Keeps only the beginning quarter of the query action: frames after the
// cutoff are removed, and every hyperedge whose effect is not complete by
// the cutoff is removed with them (an action only counts as observed once
// its effect segment is fully visible).
SituationHypergraph mask_for_prediction(const SituationHypergraph& graph,
                                        const std::string& query_action);

// Removes the answer action's hyperedge and the frames exclusive to its
// effect segment; its precondition frame and everything belonging to other
// actions stay visible.
SituationHypergraph mask_for_feasibility(const SituationHypergraph& graph,
                                         const std::string& answer_action);

// Checks every structural invariant; returns one violation per offending
// element. Empty result means the graph is well-formed.
std::vector<Violation> validate_graph(const SituationHypergraph& graph, const Vocabulary& voc);

// JSON (de)serialization. Round-trips exactly: parse(serialize(g)) == g.
std::string serialize_graph(const SituationHypergraph& graph);
SituationHypergraph parse_graph(const std::string& json_text);

std::string serialize_corpus(const std::vector<SituationHypergraph>& graphs);
std::vector<SituationHypergraph> parse_corpus(const std::string& json_text);
std::vector<SituationHypergraph> load_corpus_file(const std::string& path);

}  // namespace star
