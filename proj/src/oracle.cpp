#include "star/oracle.hpp"

#include <algorithm>

#include "star/surface.hpp"

namespace star {

// The evaluation below is deliberately naive: plain vectors, repeated
// linear scans, no sharing with the executor's value machinery. Slow and
// obvious beats fast and clever for a verification oracle.

namespace {

struct Fact {
    std::string id;
    std::string verb;
    std::string object;
    int start = 0;
    int end = 0;
};

std::vector<Fact> all_facts(const SituationHypergraph& g) {
    std::vector<Fact> out;
    for (const auto& a : g.actions) out.push_back({a.id, a.verb, a.object, a.start, a.end});
    return out;
}

std::string class_lookup(const SituationHypergraph& g, const std::string& node_id) {
    for (const auto& e : g.entities)
        if (e.id == node_id) return e.cls;
    throw DanglingIdError("node id '" + node_id + "' does not resolve in the graph");
}

std::vector<std::string> sorted_unique(std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::string flat_triplet(const RelationTriplet& t) {
    return t.subject + "|" + t.predicate + "|" + t.object + "|" + std::to_string(t.frame);
}

Fact fact_by_id(const SituationHypergraph& g, const std::string& id) {
    for (const auto& a : g.actions)
        if (a.id == id) return {a.id, a.verb, a.object, a.start, a.end};
    throw DanglingIdError("action id '" + id + "' does not resolve in the graph");
}

struct NaiveEval {
    const SituationHypergraph& g;
    const Vocabulary& voc;

    OracleValue eval(const ProgramNode& node, bool is_root) {
        OracleValue v = apply(node);
        if (v.unanswerable) return v;
        bool empty_set = v.type != ValueType::Boolean && v.elements.empty();
        if (!is_root && empty_set) {
            OracleValue stop;
            stop.unanswerable = true;
            return stop;
        }
        return v;
    }

    OracleValue child(const ProgramNode& node, size_t i) { return eval(*node.args[i].node, false); }

    OracleValue apply(const ProgramNode& node) {
        const std::string& op = node.op_name;
        OracleValue v;

        if (op == "AllActions") {
            v.type = ValueType::ActionSet;
            std::vector<std::string> ids;
            for (const auto& f : all_facts(g)) ids.push_back(f.id);
            v.elements = sorted_unique(ids);
            return v;
        }

        if (op == "Query_Objects" || op == "Query_Verbs") {
            OracleValue in = child(node, 0);
            if (in.unanswerable) return in;
            v.type = op == "Query_Objects" ? ValueType::ObjectSet : ValueType::VerbSet;
            std::vector<std::string> items;
            for (const auto& id : in.elements) {
                Fact f = fact_by_id(g, id);
                items.push_back(op == "Query_Objects" ? f.object : f.verb);
            }
            v.elements = sorted_unique(items);
            return v;
        }

        if (op == "Query_Earliest" || op == "Query_Latest") {
            OracleValue in = child(node, 0);
            if (in.unanswerable) return in;
            v.type = ValueType::ActionSet;
            if (in.elements.empty()) return v;
            std::vector<Fact> facts;
            for (const auto& id : in.elements) facts.push_back(fact_by_id(g, id));
            Fact best = facts.front();
            for (const auto& f : facts) {
                bool f_first = f.start < best.start ||
                               (f.start == best.start && f.end < best.end) ||
                               (f.start == best.start && f.end == best.end && f.id < best.id);
                if (op == "Query_Earliest" ? f_first : !f_first && !(f.id == best.id)) best = f;
            }
            v.elements = {best.id};
            return v;
        }

        if (op == "Query_Relation_Objects") {
            OracleValue in = child(node, 0);
            if (in.unanswerable) return in;
            v.type = ValueType::ObjectSet;
            std::vector<std::string> items;
            for (const auto& flat : in.elements) {
                size_t a = flat.find('|');
                size_t b = flat.find('|', a + 1);
                size_t c = flat.find('|', b + 1);
                items.push_back(class_lookup(g, flat.substr(b + 1, c - b - 1)));
            }
            v.elements = sorted_unique(items);
            return v;
        }

        if (op == "Filter_Actions_by_Verb" || op == "Filter_Actions_by_Object") {
            OracleValue in = child(node, 0);
            if (in.unanswerable) return in;
            const std::string want = node.args[1].literal;
            if (op == "Filter_Actions_by_Verb" && !voc.is_verb(want))
                throw DanglingIdError("unknown verb '" + want + "'");
            if (op == "Filter_Actions_by_Object" && !voc.is_object(want))
                throw DanglingIdError("unknown object '" + want + "'");
            v.type = ValueType::ActionSet;
            std::vector<std::string> keep;
            for (const auto& id : in.elements) {
                Fact f = fact_by_id(g, id);
                if ((op == "Filter_Actions_by_Verb" ? f.verb : f.object) == want) keep.push_back(id);
            }
            v.elements = sorted_unique(keep);
            return v;
        }

        if (op == "Filter_Actions_by_Objects") {
            OracleValue in = child(node, 0);
            if (in.unanswerable) return in;
            OracleValue objects = child(node, 1);
            if (objects.unanswerable) return objects;
            v.type = ValueType::ActionSet;
            std::vector<std::string> keep;
            for (const auto& id : in.elements) {
                Fact f = fact_by_id(g, id);
                for (const auto& o : objects.elements)
                    if (o == f.object) keep.push_back(id);
            }
            v.elements = sorted_unique(keep);
            return v;
        }

        if (op == "Filter_Relations_by_Predicate") {
            OracleValue in = child(node, 0);
            if (in.unanswerable) return in;
            const std::string want = node.args[1].literal;
            if (!voc.is_relationship(want)) throw DanglingIdError("unknown relationship '" + want + "'");
            v.type = ValueType::RelationSet;
            std::vector<std::string> keep;
            for (const auto& flat : in.elements) {
                size_t a = flat.find('|');
                size_t b = flat.find('|', a + 1);
                if (flat.substr(a + 1, b - a - 1) == want) keep.push_back(flat);
            }
            v.elements = sorted_unique(keep);
            return v;
        }

        if (op == "Relate_Objects" || op == "Relate_Subjects" || op == "Relate_Triplets") {
            const std::string first = node.args[0].literal;
            const std::string second = node.args[1].literal;
            if (op == "Relate_Objects" && first != kPersonClass && !voc.is_object(first))
                throw DanglingIdError("unknown subject class '" + first + "'");
            if (op == "Relate_Subjects" && !voc.is_object(first))
                throw DanglingIdError("unknown object '" + first + "'");
            if (op == "Relate_Triplets" && first != kPersonClass && !voc.is_object(first))
                throw DanglingIdError("unknown subject class '" + first + "'");
            if (op != "Relate_Triplets" && !voc.is_relationship(second))
                throw DanglingIdError("unknown relationship '" + second + "'");
            if (op == "Relate_Triplets" && !voc.is_object(second))
                throw DanglingIdError("unknown object '" + second + "'");

            std::vector<std::string> items;
            for (const auto& f : g.frames) {
                for (const auto& t : f.triplets) {
                    std::string subj_cls = class_lookup(g, t.subject);
                    std::string obj_cls = class_lookup(g, t.object);
                    if (op == "Relate_Objects" && subj_cls == first && t.predicate == second)
                        items.push_back(obj_cls);
                    if (op == "Relate_Subjects" && obj_cls == first && t.predicate == second)
                        items.push_back(subj_cls);
                    if (op == "Relate_Triplets" && subj_cls == first && obj_cls == second)
                        items.push_back(flat_triplet(t));
                }
            }
            v.type = op == "Relate_Triplets" ? ValueType::RelationSet : ValueType::ObjectSet;
            v.elements = sorted_unique(items);
            return v;
        }

        if (op == "Temporal_After" || op == "Temporal_Before" || op == "Temporal_While") {
            OracleValue in = child(node, 0);
            if (in.unanswerable) return in;

            Fact anchor;
            if (node.args[1].is_literal()) {
                anchor = fact_by_id(g, node.args[1].literal);
            } else {
                OracleValue av = child(node, 1);
                if (av.unanswerable) return av;
                if (av.elements.size() != 1) {
                    v.unanswerable = true;
                    return v;
                }
                anchor = fact_by_id(g, av.elements.front());
            }

            v.type = ValueType::ActionSet;
            std::vector<std::string> keep;
            for (const auto& id : in.elements) {
                Fact f = fact_by_id(g, id);
                bool ok = false;
                if (op == "Temporal_After") ok = f.start > anchor.end;
                if (op == "Temporal_Before") ok = f.end < anchor.start;
                if (op == "Temporal_While")
                    ok = f.id != anchor.id && f.start <= anchor.end && f.end >= anchor.start;
                if (ok) keep.push_back(id);
            }
            v.elements = sorted_unique(keep);
            return v;
        }

        if (op == "Verify_Actions" || op == "Verify_Objects" || op == "Verify_Verbs" ||
            op == "Verify_Relations") {
            OracleValue in = child(node, 0);
            if (in.unanswerable) return in;
            v.type = ValueType::Boolean;
            if (op == "Verify_Actions") {
                const std::string verb = node.args[1].literal;
                const std::string object = node.args[2].literal;
                if (!voc.is_verb(verb)) throw DanglingIdError("unknown verb '" + verb + "'");
                if (!voc.is_object(object)) throw DanglingIdError("unknown object '" + object + "'");
                for (const auto& id : in.elements) {
                    Fact f = fact_by_id(g, id);
                    if (f.verb == verb && f.object == object) v.boolean = true;
                }
            } else if (op == "Verify_Relations") {
                const std::string rel = node.args[1].literal;
                if (!voc.is_relationship(rel)) throw DanglingIdError("unknown relationship '" + rel + "'");
                for (const auto& flat : in.elements) {
                    size_t a = flat.find('|');
                    size_t b = flat.find('|', a + 1);
                    if (flat.substr(a + 1, b - a - 1) == rel) v.boolean = true;
                }
            } else {
                const std::string want = node.args[1].literal;
                if (op == "Verify_Objects" && !voc.is_object(want))
                    throw DanglingIdError("unknown object '" + want + "'");
                if (op == "Verify_Verbs" && !voc.is_verb(want))
                    throw DanglingIdError("unknown verb '" + want + "'");
                for (const auto& e : in.elements)
                    if (e == want) v.boolean = true;
            }
            return v;
        }

        throw ParseError("unknown operation '" + op + "'");
    }
};

}  // namespace

OracleValue oracle_evaluate(const FunctionalProgram& p, const SituationHypergraph& graph,
                            const Vocabulary& voc) {
    if (p.empty()) throw ParseError("empty program");
    NaiveEval ev{graph, voc};
    return ev.eval(*p.root, true);
}

int brute_force_oracle(const QAItem& item, const SituationHypergraph& gt, const Vocabulary& voc) {
    OracleValue value = oracle_evaluate(item.program, gt, voc);
    if (value.unanswerable)
        throw AmbiguityError("item '" + item.id + "': question is unanswerable on its ground truth");

    std::vector<int> consistent;
    for (int i = 0; i < 4; ++i) {
        auto comp = parse_option(item.options[static_cast<size_t>(i)], voc);
        if (!comp) continue;
        bool ok = false;
        switch (value.type) {
            case ValueType::ActionSet: {
                if (!comp->verb || !comp->object) break;
                for (const auto& id : value.elements) {
                    Fact f = fact_by_id(gt, id);
                    if (f.verb == *comp->verb && f.object == *comp->object) ok = true;
                }
                break;
            }
            case ValueType::ObjectSet: {
                if (!comp->object || comp->verb) break;
                for (const auto& e : value.elements)
                    if (e == *comp->object) ok = true;
                break;
            }
            case ValueType::VerbSet: {
                if (!comp->verb || comp->object) break;
                for (const auto& e : value.elements)
                    if (e == *comp->verb) ok = true;
                break;
            }
            default:
                break;
        }
        if (ok) consistent.push_back(i);
    }

    if (consistent.size() != 1)
        throw AmbiguityError("item '" + item.id + "': " + std::to_string(consistent.size()) +
                             " options consistent with the situation");
    return consistent.front();
}

}  // namespace star
