#include "star/hypergraph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "star/errors.hpp"

namespace star {

using nlohmann::json;

const EntityNode* SituationHypergraph::find_entity(const std::string& node_id) const {
    for (const auto& e : entities)
        if (e.id == node_id) return &e;
    return nullptr;
}

const ActionHyperedge* SituationHypergraph::find_action(const std::string& action_id) const {
    for (const auto& a : actions)
        if (a.id == action_id) return &a;
    return nullptr;
}

const FrameSubgraph* SituationHypergraph::find_frame(int frame) const {
    for (const auto& f : frames)
        if (f.frame == frame) return &f;
    return nullptr;
}

std::set<int> SituationHypergraph::frame_span(const std::string& node_id) const {
    std::set<int> out;
    for (const auto& f : frames)
        if (f.nodes.count(node_id)) out.insert(f.frame);
    return out;
}

PropagationRules default_propagation_rules() {
    return PropagationRules{{"on", "holding", "sitting_on", "lying_on"}};
}

PropagationRules load_propagation_rules(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("propagation rules: ") + e.what());
    }
    if (!doc.contains("contact_predicates") || !doc["contact_predicates"].is_array())
        throw ParseError("propagation rules: missing 'contact_predicates' array");
    PropagationRules rules;
    for (const auto& p : doc["contact_predicates"]) rules.contact_predicates.push_back(p.get<std::string>());
    return rules;
}

PropagationRules load_propagation_rules_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("propagation rules: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return load_propagation_rules(ss.str());
}

namespace {

void sort_actions(std::vector<ActionHyperedge>& actions) {
    std::sort(actions.begin(), actions.end(), [](const ActionHyperedge& a, const ActionHyperedge& b) {
        return std::tie(a.start, a.end, a.id) < std::tie(b.start, b.end, b.id);
    });
}

// Member frames of [start, end] and the precondition/effect split. The
// interval start is re-anchored to the first member frame so that the
// precondition frame always references an existing subgraph.
void anchor_action(ActionHyperedge& a, const std::vector<FrameSubgraph>& frames) {
    std::vector<int> members;
    for (const auto& f : frames)
        if (f.frame >= a.start && f.frame <= a.end) members.push_back(f.frame);
    if (members.empty())
        throw ValidationError("action '" + a.id + "' interval outside frame range");
    a.start = members.front();
    a.precondition_frame = a.start;
    a.effect_frames.assign(members.begin() + 1, members.end());
}

}  // namespace

SituationHypergraph build_hypergraph(const std::string& id,
                                     std::vector<EntityNode> entities,
                                     std::vector<FrameSubgraph> frames,
                                     const std::vector<ActionAnnotation>& annotations,
                                     const Vocabulary& voc) {
    for (size_t i = 1; i < frames.size(); ++i)
        if (frames[i - 1].frame >= frames[i].frame)
            throw ValidationError("frames must be sorted by strictly increasing index");
    if (frames.empty()) throw ValidationError("empty situation");

    SituationHypergraph g;
    g.id = id;
    g.entities = std::move(entities);
    g.frames = std::move(frames);
    g.source_interval = {g.frames.front().frame, g.frames.back().frame};
    std::sort(g.entities.begin(), g.entities.end());
    for (auto& f : g.frames) {
        std::set<RelationTriplet> stamped;
        for (RelationTriplet t : f.triplets) {
            t.frame = f.frame;
            stamped.insert(t);
        }
        f.triplets = std::move(stamped);
    }

    std::set<std::string> seen_ids;
    for (const auto& ann : annotations) {
        if (ann.start > ann.end)
            throw ValidationError("action '" + ann.id + "' has inverted interval [" +
                                  std::to_string(ann.start) + "," + std::to_string(ann.end) + "]");
        if (!validate_composition(ann.verb, ann.object, voc))
            throw ValidationError("action '" + ann.id + "' has unknown predicate (" + ann.verb + ", " +
                                  ann.object + ")");
        if (!seen_ids.insert(ann.id).second)
            throw ValidationError("duplicate action id '" + ann.id + "'");
        ActionHyperedge a;
        a.id = ann.id;
        a.verb = ann.verb;
        a.object = ann.object;
        a.start = ann.start;
        a.end = ann.end;
        anchor_action(a, g.frames);
        g.actions.push_back(a);
    }
    sort_actions(g.actions);
    return g;
}

SituationHypergraph propagate_relations(const SituationHypergraph& graph,
                                        const Vocabulary& voc,
                                        const PropagationRules& rules) {
    std::set<std::string> contacts(rules.contact_predicates.begin(), rules.contact_predicates.end());
    SituationHypergraph out = graph;
    for (auto& f : out.frames) {
        bool changed = true;
        while (changed) {
            changed = false;
            std::vector<RelationTriplet> fresh;
            for (const auto& t1 : f.triplets) {
                if (!contacts.count(t1.predicate)) continue;
                for (const auto& t2 : f.triplets) {
                    if (t2.subject != t1.object) continue;
                    if (!voc.is_spatial(t2.predicate)) continue;
                    if (t1.subject == t2.object) continue;  // would be a self-loop
                    RelationTriplet derived{t1.subject, t2.predicate, t2.object, f.frame};
                    if (!f.triplets.count(derived)) fresh.push_back(derived);
                }
            }
            for (const auto& t : fresh) changed |= f.triplets.insert(t).second;
        }
    }
    return out;
}

SituationHypergraph trim(const SituationHypergraph& graph, std::pair<int, int> window) {
    auto [ws, we] = window;
    if (ws > we) throw ValidationError("inverted trim window");
    if (we < graph.source_interval.first || ws > graph.source_interval.second)
        throw ValidationError("empty situation");

    SituationHypergraph out;
    out.id = graph.id;
    out.source_interval = window;
    for (const auto& f : graph.frames)
        if (f.frame >= ws && f.frame <= we) out.frames.push_back(f);
    if (out.frames.empty()) throw ValidationError("empty situation");

    for (const auto& a : graph.actions) {
        ActionHyperedge clipped = a;
        clipped.start = std::max(a.start, ws);
        clipped.end = std::min(a.end, we);
        if (clipped.start > clipped.end) continue;
        bool has_member = false;
        for (const auto& f : out.frames)
            if (f.frame >= clipped.start && f.frame <= clipped.end) { has_member = true; break; }
        if (!has_member) continue;
        anchor_action(clipped, out.frames);
        out.actions.push_back(clipped);
    }
    sort_actions(out.actions);

    std::set<std::string> kept_nodes;
    for (const auto& f : out.frames) kept_nodes.insert(f.nodes.begin(), f.nodes.end());
    for (const auto& e : graph.entities)
        if (kept_nodes.count(e.id)) out.entities.push_back(e);
    return out;
}

int prediction_cutoff(const ActionHyperedge& action) {
    int quarter = action.length() / 4;
    return action.start + std::max(1, quarter) - 1;
}

SituationHypergraph mask_for_prediction(const SituationHypergraph& graph,
                                        const std::string& query_action) {
    const ActionHyperedge* q = graph.find_action(query_action);
    if (!q) throw DanglingIdError("unknown action id '" + query_action + "'");
    int cutoff = prediction_cutoff(*q);

    SituationHypergraph out;
    out.id = graph.id;
    out.source_interval = {graph.source_interval.first, std::min(graph.source_interval.second, cutoff)};
    for (const auto& f : graph.frames)
        if (f.frame <= cutoff) out.frames.push_back(f);
    for (const auto& a : graph.actions)
        if (a.end <= cutoff) out.actions.push_back(a);
    sort_actions(out.actions);

    std::set<std::string> kept_nodes;
    for (const auto& f : out.frames) kept_nodes.insert(f.nodes.begin(), f.nodes.end());
    for (const auto& e : graph.entities)
        if (kept_nodes.count(e.id)) out.entities.push_back(e);
    return out;
}

SituationHypergraph mask_for_feasibility(const SituationHypergraph& graph,
                                         const std::string& answer_action) {
    const ActionHyperedge* ans = graph.find_action(answer_action);
    if (!ans) throw DanglingIdError("unknown action id '" + answer_action + "'");

    SituationHypergraph out;
    out.id = graph.id;
    out.source_interval = graph.source_interval;
    for (const auto& a : graph.actions)
        if (a.id != answer_action) out.actions.push_back(a);

    for (const auto& f : graph.frames) {
        bool in_effect = f.frame > ans->start && f.frame <= ans->end;
        if (in_effect) {
            bool covered_elsewhere = false;
            for (const auto& a : out.actions)
                if (a.covers(f.frame)) { covered_elsewhere = true; break; }
            if (!covered_elsewhere) continue;
        }
        out.frames.push_back(f);
    }

    std::set<std::string> kept_nodes;
    for (const auto& f : out.frames) kept_nodes.insert(f.nodes.begin(), f.nodes.end());
    for (const auto& e : graph.entities)
        if (kept_nodes.count(e.id)) out.entities.push_back(e);
    return out;
}

std::vector<Violation> validate_graph(const SituationHypergraph& graph, const Vocabulary& voc) {
    std::vector<Violation> out;
    auto add = [&out](const std::string& code, const std::string& msg) {
        out.push_back({code, msg});
    };

    std::set<int> frame_indices;
    for (size_t i = 0; i < graph.frames.size(); ++i) {
        const auto& f = graph.frames[i];
        if (f.frame < 0) add("negative_frame", "frame index " + std::to_string(f.frame) + " is negative");
        if (i > 0 && graph.frames[i - 1].frame >= f.frame)
            add("unsorted_frames", "frame " + std::to_string(f.frame) + " not strictly after its predecessor");
        frame_indices.insert(f.frame);
        for (const auto& t : f.triplets) {
            if (t.subject == t.object)
                add("self_loop", "frame " + std::to_string(f.frame) + ": triplet <" + t.subject + ", " +
                                      t.predicate + ", " + t.object + "> is a self-loop");
            if (!voc.is_relationship(t.predicate))
                add("unknown_relationship", "frame " + std::to_string(f.frame) + ": predicate '" +
                                                 t.predicate + "' not in vocabulary");
            for (const std::string& endpoint : {t.subject, t.object}) {
                if (!f.nodes.count(endpoint))
                    add("dangling_triplet_node",
                        "frame " + std::to_string(f.frame) + ": triplet <" + t.subject + ", " + t.predicate +
                            ", " + t.object + "> references node '" + endpoint + "' absent from the frame");
            }
            if (t.frame != f.frame)
                add("triplet_frame_mismatch",
                    "frame " + std::to_string(f.frame) + ": triplet carries frame " + std::to_string(t.frame));
        }
    }

    std::set<std::string> entity_ids;
    for (const auto& e : graph.entities) {
        if (!entity_ids.insert(e.id).second) add("duplicate_entity", "entity '" + e.id + "' listed twice");
        if (e.kind == NodeKind::Object && !voc.is_object(e.cls))
            add("unknown_object_class", "entity '" + e.id + "' has unknown class '" + e.cls + "'");
        if (e.kind == NodeKind::Person && e.cls != kPersonClass)
            add("bad_person_class", "person entity '" + e.id + "' has class '" + e.cls + "'");
        if (graph.frame_span(e.id).empty())
            add("empty_frame_span", "entity '" + e.id + "' appears in no frame");
    }
    for (const auto& f : graph.frames)
        for (const auto& n : f.nodes)
            if (!entity_ids.count(n))
                add("unknown_node", "frame " + std::to_string(f.frame) + " lists unknown node '" + n + "'");

    std::set<std::string> entity_classes;
    for (const auto& e : graph.entities) entity_classes.insert(e.cls);

    std::set<std::string> action_ids;
    for (const auto& a : graph.actions) {
        if (!action_ids.insert(a.id).second) add("duplicate_action", "action '" + a.id + "' listed twice");
        if (!entity_classes.count(a.object))
            add("action_object_missing",
                "action '" + a.id + "' interacts with '" + a.object + "' but no such node exists");
        if (a.start > a.end)
            add("inverted_interval", "action '" + a.id + "' has inverted interval");
        if (!validate_composition(a.verb, a.object, voc))
            add("unknown_predicate",
                "action '" + a.id + "' has predicate (" + a.verb + ", " + a.object + ") not in vocabulary");
        if (a.start < graph.source_interval.first || a.end > graph.source_interval.second)
            add("interval_outside_source", "action '" + a.id + "' exceeds the source interval");
        if (a.precondition_frame != a.start)
            add("precondition_mismatch", "action '" + a.id + "' precondition frame is not its start");
        if (!frame_indices.count(a.precondition_frame))
            add("missing_precondition_frame",
                "action '" + a.id + "' precondition frame " + std::to_string(a.precondition_frame) +
                    " has no subgraph");
        for (int ef : a.effect_frames) {
            if (ef <= a.start || ef > a.end)
                add("effect_outside_interval",
                    "action '" + a.id + "' effect frame " + std::to_string(ef) + " outside (start, end]");
            if (!frame_indices.count(ef))
                add("missing_effect_frame",
                    "action '" + a.id + "' effect frame " + std::to_string(ef) + " has no subgraph");
        }
    }
    return out;
}

namespace {

json graph_to_json(const SituationHypergraph& g) {
    json doc;
    doc["id"] = g.id;
    doc["source_interval"] = {g.source_interval.first, g.source_interval.second};
    doc["entities"] = json::array();
    for (const auto& e : g.entities)
        doc["entities"].push_back({{"id", e.id},
                                   {"kind", e.kind == NodeKind::Person ? "person" : "object"},
                                   {"class", e.cls}});
    doc["frames"] = json::array();
    for (const auto& f : g.frames) {
        json jf;
        jf["frame"] = f.frame;
        jf["nodes"] = f.nodes;
        jf["triplets"] = json::array();
        for (const auto& t : f.triplets) jf["triplets"].push_back({t.subject, t.predicate, t.object});
        doc["frames"].push_back(jf);
    }
    doc["actions"] = json::array();
    for (const auto& a : g.actions)
        doc["actions"].push_back(
            {{"id", a.id}, {"verb", a.verb}, {"object", a.object}, {"start", a.start}, {"end", a.end}});
    return doc;
}

SituationHypergraph graph_from_json(const json& doc) {
    SituationHypergraph g;
    try {
        g.id = doc.at("id").get<std::string>();
        g.source_interval = {doc.at("source_interval").at(0).get<int>(),
                             doc.at("source_interval").at(1).get<int>()};
        for (const auto& je : doc.at("entities")) {
            EntityNode e;
            e.id = je.at("id").get<std::string>();
            e.kind = je.at("kind").get<std::string>() == "person" ? NodeKind::Person : NodeKind::Object;
            e.cls = je.at("class").get<std::string>();
            g.entities.push_back(e);
        }
        std::sort(g.entities.begin(), g.entities.end());
        for (const auto& jf : doc.at("frames")) {
            FrameSubgraph f;
            f.frame = jf.at("frame").get<int>();
            for (const auto& n : jf.at("nodes")) f.nodes.insert(n.get<std::string>());
            for (const auto& jt : jf.at("triplets"))
                f.triplets.insert({jt.at(0).get<std::string>(), jt.at(1).get<std::string>(),
                                   jt.at(2).get<std::string>(), f.frame});
            g.frames.push_back(std::move(f));
        }
        for (const auto& ja : doc.at("actions")) {
            ActionHyperedge a;
            a.id = ja.at("id").get<std::string>();
            a.verb = ja.at("verb").get<std::string>();
            a.object = ja.at("object").get<std::string>();
            a.start = ja.at("start").get<int>();
            a.end = ja.at("end").get<int>();
            anchor_action(a, g.frames);
            g.actions.push_back(a);
        }
        sort_actions(g.actions);
    } catch (const json::exception& e) {
        throw ParseError(std::string("hypergraph document: ") + e.what());
    }
    return g;
}

}  // namespace

std::string serialize_graph(const SituationHypergraph& graph) {
    return graph_to_json(graph).dump(2) + "\n";
}

SituationHypergraph parse_graph(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("hypergraph document: ") + e.what());
    }
    return graph_from_json(doc);
}

std::string serialize_corpus(const std::vector<SituationHypergraph>& graphs) {
    json arr = json::array();
    for (const auto& g : graphs) arr.push_back(graph_to_json(g));
    return arr.dump(2) + "\n";
}

std::vector<SituationHypergraph> parse_corpus(const std::string& json_text) {
    json arr;
    try {
        arr = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("hypergraph corpus: ") + e.what());
    }
    if (!arr.is_array()) throw ParseError("hypergraph corpus: expected a JSON array");
    std::vector<SituationHypergraph> out;
    for (const auto& doc : arr) out.push_back(graph_from_json(doc));
    return out;
}

std::vector<SituationHypergraph> load_corpus_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("hypergraph corpus: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_corpus(ss.str());
}

}  // namespace star
