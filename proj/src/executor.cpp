#include "star/executor.hpp"

#include <algorithm>
#include <map>

#include "star/errors.hpp"

namespace star {

namespace {

// Orders actions by (start, end, id); earliest = first, latest = last.
bool action_before(const ActionHyperedge& a, const ActionHyperedge& b) {
    return std::tie(a.start, a.end, a.id) < std::tie(b.start, b.end, b.id);
}

class Evaluator {
public:
    Evaluator(const SituationHypergraph& graph, const Vocabulary& voc, ExecutionTrace* trace)
        : graph_(graph), voc_(voc), trace_(trace) {
        for (const auto& e : graph.entities) node_class_[e.id] = e.cls;
    }

    ExecValue eval(const ProgramNode& node, const std::string& path, bool is_root) {
        ExecValue value = apply(node, path);
        if (trace_) trace_->entries.push_back({path, node.op_name, value});
        if (!is_root && value.empty_set())
            throw Unanswerable("empty intermediate result at " + path + " ('" + node.op_name + "')");
        return value;
    }

private:
    ExecValue apply(const ProgramNode& node, const std::string& path) {
        const std::string& op = node.op_name;
        auto value_arg = [&](size_t i) {
            return eval(*node.args[i].node, path + "." + std::to_string(i), false);
        };

        if (op == "AllActions") {
            ExecValue v = actions_value();
            for (const auto& a : graph_.actions) v.ids.insert(a.id);
            return v;
        }

        if (op == "Query_Objects") {
            ExecValue in = value_arg(0);
            ExecValue v{ValueType::ObjectSet};
            for (const auto& id : in.ids) v.ids.insert(action(id).object);
            return v;
        }
        if (op == "Query_Verbs") {
            ExecValue in = value_arg(0);
            ExecValue v{ValueType::VerbSet};
            for (const auto& id : in.ids) v.ids.insert(action(id).verb);
            return v;
        }
        if (op == "Query_Earliest" || op == "Query_Latest") {
            ExecValue in = value_arg(0);
            ExecValue v = actions_value();
            if (in.ids.empty()) return v;
            const ActionHyperedge* best = nullptr;
            for (const auto& id : in.ids) {
                const ActionHyperedge& a = action(id);
                if (!best) { best = &a; continue; }
                bool earlier = action_before(a, *best);
                if ((op == "Query_Earliest") ? earlier : action_before(*best, a)) best = &a;
            }
            v.ids.insert(best->id);
            return v;
        }
        if (op == "Query_Relation_Objects") {
            ExecValue in = value_arg(0);
            ExecValue v{ValueType::ObjectSet};
            for (const auto& t : in.triplets) v.ids.insert(class_of(t.object));
            return v;
        }

        if (op == "Filter_Actions_by_Verb") {
            ExecValue in = value_arg(0);
            const std::string& verb = verb_literal(node.args[1].literal);
            ExecValue v = actions_value();
            for (const auto& id : in.ids)
                if (action(id).verb == verb) v.ids.insert(id);
            return v;
        }
        if (op == "Filter_Actions_by_Object") {
            ExecValue in = value_arg(0);
            const std::string& object = object_literal(node.args[1].literal);
            ExecValue v = actions_value();
            for (const auto& id : in.ids)
                if (action(id).object == object) v.ids.insert(id);
            return v;
        }
        if (op == "Filter_Actions_by_Objects") {
            ExecValue in = value_arg(0);
            ExecValue objects = value_arg(1);
            ExecValue v = actions_value();
            for (const auto& id : in.ids)
                if (objects.ids.count(action(id).object)) v.ids.insert(id);
            return v;
        }
        if (op == "Filter_Relations_by_Predicate") {
            ExecValue in = value_arg(0);
            const std::string& rel = relation_literal(node.args[1].literal);
            ExecValue v{ValueType::RelationSet};
            for (const auto& t : in.triplets)
                if (t.predicate == rel) v.triplets.insert(t);
            return v;
        }

        if (op == "Relate_Objects") {
            const std::string& subject_class = subject_literal(node.args[0].literal);
            const std::string& rel = relation_literal(node.args[1].literal);
            ExecValue v{ValueType::ObjectSet};
            for_each_triplet([&](const RelationTriplet& t) {
                if (class_of(t.subject) == subject_class && t.predicate == rel)
                    v.ids.insert(class_of(t.object));
            });
            return v;
        }
        if (op == "Relate_Subjects") {
            const std::string& object_class = object_literal(node.args[0].literal);
            const std::string& rel = relation_literal(node.args[1].literal);
            ExecValue v{ValueType::ObjectSet};
            for_each_triplet([&](const RelationTriplet& t) {
                if (class_of(t.object) == object_class && t.predicate == rel)
                    v.ids.insert(class_of(t.subject));
            });
            return v;
        }
        if (op == "Relate_Triplets") {
            const std::string& subject_class = subject_literal(node.args[0].literal);
            const std::string& object_class = object_literal(node.args[1].literal);
            ExecValue v{ValueType::RelationSet};
            for_each_triplet([&](const RelationTriplet& t) {
                if (class_of(t.subject) == subject_class && class_of(t.object) == object_class)
                    v.triplets.insert(t);
            });
            return v;
        }

        if (op == "Temporal_After" || op == "Temporal_Before" || op == "Temporal_While") {
            ExecValue in = value_arg(0);
            const ActionHyperedge& anchor = resolve_anchor(node.args[1], path);
            ExecValue v = actions_value();
            for (const auto& id : in.ids) {
                const ActionHyperedge& a = action(id);
                bool keep = false;
                if (op == "Temporal_After")
                    keep = a.start > anchor.end;
                else if (op == "Temporal_Before")
                    keep = a.end < anchor.start;
                else
                    keep = a.id != anchor.id && a.start <= anchor.end && a.end >= anchor.start;
                if (keep) v.ids.insert(id);
            }
            return v;
        }

        if (op == "Verify_Actions") {
            ExecValue in = value_arg(0);
            const std::string& verb = verb_literal(node.args[1].literal);
            const std::string& object = object_literal(node.args[2].literal);
            ExecValue v{ValueType::Boolean};
            for (const auto& id : in.ids)
                if (action(id).verb == verb && action(id).object == object) v.boolean = true;
            return v;
        }
        if (op == "Verify_Objects" || op == "Verify_Verbs") {
            ExecValue in = value_arg(0);
            const std::string& target = op == "Verify_Objects" ? object_literal(node.args[1].literal)
                                                               : verb_literal(node.args[1].literal);
            ExecValue v{ValueType::Boolean};
            v.boolean = in.ids.count(target) > 0;
            return v;
        }
        if (op == "Verify_Relations") {
            ExecValue in = value_arg(0);
            const std::string& rel = relation_literal(node.args[1].literal);
            ExecValue v{ValueType::Boolean};
            for (const auto& t : in.triplets)
                if (t.predicate == rel) v.boolean = true;
            return v;
        }

        throw ParseError("unknown operation '" + op + "'");
    }

    static ExecValue actions_value() { return ExecValue{ValueType::ActionSet}; }

    const ActionHyperedge& action(const std::string& id) const {
        const ActionHyperedge* a = graph_.find_action(id);
        if (!a) throw DanglingIdError("action id '" + id + "' does not resolve in the graph");
        return *a;
    }

    const std::string& class_of(const std::string& node_id) const {
        auto it = node_class_.find(node_id);
        if (it == node_class_.end())
            throw DanglingIdError("node id '" + node_id + "' does not resolve in the graph");
        return it->second;
    }

    const std::string& verb_literal(const std::string& v) const {
        if (!voc_.is_verb(v)) throw DanglingIdError("unknown verb '" + v + "'");
        return v;
    }
    const std::string& object_literal(const std::string& o) const {
        if (!voc_.is_object(o)) throw DanglingIdError("unknown object '" + o + "'");
        return o;
    }
    const std::string& subject_literal(const std::string& s) const {
        if (s != kPersonClass && !voc_.is_object(s))
            throw DanglingIdError("unknown subject class '" + s + "'");
        return s;
    }
    const std::string& relation_literal(const std::string& r) const {
        if (!voc_.is_relationship(r)) throw DanglingIdError("unknown relationship '" + r + "'");
        return r;
    }

    template <typename Fn>
    void for_each_triplet(Fn&& fn) const {
        for (const auto& f : graph_.frames)
            for (const auto& t : f.triplets) fn(t);
    }

    const ActionHyperedge& resolve_anchor(const ProgramArg& a, const std::string& path) {
        if (a.is_literal()) return action(a.literal);
        ExecValue v = eval(*a.node, path + ".1", false);
        if (v.ids.size() != 1)
            throw Unanswerable("ambiguous anchor at " + path + ": " + std::to_string(v.ids.size()) +
                               " actions match");
        return action(*v.ids.begin());
    }

    const SituationHypergraph& graph_;
    const Vocabulary& voc_;
    ExecutionTrace* trace_;
    std::map<std::string, std::string> node_class_;
};

}  // namespace

ExecValue execute(const FunctionalProgram& p, const SituationHypergraph& graph, const Vocabulary& voc) {
    if (p.empty()) throw ParseError("empty program");
    Evaluator ev(graph, voc, nullptr);
    return ev.eval(*p.root, "root", true);
}

ExecutionTrace execute_traced(const FunctionalProgram& p, const SituationHypergraph& graph,
                              const Vocabulary& voc) {
    if (p.empty()) throw ParseError("empty program");
    ExecutionTrace trace;
    Evaluator ev(graph, voc, &trace);
    trace.result = ev.eval(*p.root, "root", true);
    return trace;
}

}  // namespace star
