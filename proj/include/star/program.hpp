#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace star {

enum class OpFamily { Query, Filter, Relate, Temporal, Verify };

enum class ValueType { ActionSet, ObjectSet, VerbSet, RelationSet, Boolean };

std::string to_string(ValueType t);
std::string to_string(OpFamily f);

// What an operation expects at each argument position.
//   Value      — a nested call producing the given value type (AllActions
//                counts as a call of result ActionSet)
//   Anchor     — a nested call producing a singleton ActionSet, or an
//                action-instance id literal resolved against the graph
//   *Lit       — an identifier literal of the given category
enum class ArgKind { Value, Anchor, VerbLit, ObjectLit, SubjectLit, RelationLit };

struct ParamSpec {
    ArgKind kind;
    ValueType value_type = ValueType::ActionSet;  // meaningful for Value params
};

struct OpSignature {
    std::string name;
    OpFamily family;
    std::vector<ParamSpec> params;
    ValueType result;
};

// Full operation table of the DSL. Stable order; names are unique.
const std::vector<OpSignature>& op_signatures();
const OpSignature* find_signature(const std::string& name);

struct ProgramNode;
using NodePtr = std::shared_ptr<const ProgramNode>;

// One argument: either a literal token or a nested call.
struct ProgramArg {
    std::string literal;  // set when node == nullptr
    NodePtr node;

    bool is_literal() const { return node == nullptr; }
};

struct ProgramNode {
    std::string op_name;
    std::vector<ProgramArg> args;

    const OpSignature& signature() const;
    OpFamily family() const { return signature().family; }

    // Every nested call, in argument order.
    std::vector<NodePtr> children() const;
    // Every literal argument, in argument order.
    std::vector<std::string> literals() const;

    int node_count() const;
};

struct FunctionalProgram {
    NodePtr root;
    ValueType declared_output_type = ValueType::ActionSet;

    bool empty() const { return root == nullptr; }
    int node_count() const { return root ? root->node_count() : 0; }
};

bool programs_equal(const FunctionalProgram& a, const FunctionalProgram& b);

// Literal tokens of the whole tree (program-level view of the identifiers
// a question binds).
std::vector<std::string> program_literals(const FunctionalProgram& p);

// Parses a program sentence. Grammar:
//   program := call
//   call    := NAME '(' arglist ')'
//   arglist := (call | LITERAL) (',' (call | LITERAL))*
// The bare identifier `AllActions` is the source literal and parses to a
// zero-argument call node. Throws ParseError with a character position for
// syntax errors, unknown operation names and arity mismatches.
FunctionalProgram parse_program(const std::string& text);

// Canonical textual form: a single space after each comma and no other
// whitespace. parse_program(print_program(p)) reproduces p exactly.
std::string print_program(const FunctionalProgram& p);
std::string print_node(const ProgramNode& node);

struct TypecheckResult {
    bool ok = false;
    std::string error;  // names the offending node path when !ok
};

// Structural check against the signature table: arity, argument kinds and
// child value types. Identifier literals are resolved against vocabulary
// and graph only at execution time.
TypecheckResult typecheck(const FunctionalProgram& p);

// Convenience builders used by generation code and tests.
NodePtr make_call(const std::string& op, std::vector<ProgramArg> args);
ProgramArg lit(const std::string& token);
ProgramArg arg(NodePtr node);
FunctionalProgram make_program(NodePtr root);

}  // namespace star
