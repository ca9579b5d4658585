#pragma once

#include <set>
#include <string>
#include <vector>

#include "star/hypergraph.hpp"
#include "star/program.hpp"
#include "star/vocabulary.hpp"

namespace star {

// Value flowing between program operations: a deduplicated set of action
// instance ids, object classes, verb ids or relation triplets, or a boolean.
struct ExecValue {
    ValueType type = ValueType::ActionSet;
    std::set<std::string> ids;          // actions / objects / verbs
    std::set<RelationTriplet> triplets; // relations
    bool boolean = false;

    ExecValue() = default;
    explicit ExecValue(ValueType t) : type(t) {}

    size_t size() const { return type == ValueType::RelationSet ? triplets.size() : ids.size(); }
    bool is_set() const { return type != ValueType::Boolean; }
    bool empty_set() const { return is_set() && size() == 0; }

    bool operator==(const ExecValue&) const = default;
};

struct TraceEntry {
    std::string path;     // root, root.0, root.0.1, ...
    std::string op_name;
    ExecValue value;
};

struct ExecutionTrace {
    ExecValue result;
    std::vector<TraceEntry> entries;  // innermost-first evaluation order
};

// Executes a typechecked program on a validated graph. Pure: the graph is
// never modified and repeated calls return identical values. An empty set
// at any non-root node raises Unanswerable (the question cannot be decided
// on this graph); an empty set at the root is a legal answer. Anchors must
// resolve to exactly one action. Unknown identifier literals raise
// DanglingIdError.
ExecValue execute(const FunctionalProgram& p, const SituationHypergraph& graph, const Vocabulary& voc);

// Same semantics, but records every node's intermediate value. The trace
// has exactly one entry per program node.
ExecutionTrace execute_traced(const FunctionalProgram& p, const SituationHypergraph& graph,
                              const Vocabulary& voc);

}  // namespace star
