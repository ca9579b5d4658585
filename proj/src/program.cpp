#include "star/program.hpp"

#include <cctype>
#include <map>
#include <sstream>

#include "star/errors.hpp"

namespace star {

std::string to_string(ValueType t) {
    switch (t) {
        case ValueType::ActionSet: return "action_set";
        case ValueType::ObjectSet: return "object_set";
        case ValueType::VerbSet: return "verb_set";
        case ValueType::RelationSet: return "relation_set";
        case ValueType::Boolean: return "boolean";
    }
    return "?";
}

std::string to_string(OpFamily f) {
    switch (f) {
        case OpFamily::Query: return "Query";
        case OpFamily::Filter: return "Filter";
        case OpFamily::Relate: return "Relate";
        case OpFamily::Temporal: return "Temporal";
        case OpFamily::Verify: return "Verify";
    }
    return "?";
}

const std::vector<OpSignature>& op_signatures() {
    using VT = ValueType;
    using AK = ArgKind;
    static const std::vector<OpSignature> table = {
        // The source of whole-graph content: every hyperedge in the graph.
        {"AllActions", OpFamily::Query, {}, VT::ActionSet},

        {"Query_Objects", OpFamily::Query, {{AK::Value, VT::ActionSet}}, VT::ObjectSet},
        {"Query_Verbs", OpFamily::Query, {{AK::Value, VT::ActionSet}}, VT::VerbSet},
        {"Query_Earliest", OpFamily::Query, {{AK::Value, VT::ActionSet}}, VT::ActionSet},
        {"Query_Latest", OpFamily::Query, {{AK::Value, VT::ActionSet}}, VT::ActionSet},
        {"Query_Relation_Objects", OpFamily::Query, {{AK::Value, VT::RelationSet}}, VT::ObjectSet},

        {"Filter_Actions_by_Verb", OpFamily::Filter, {{AK::Value, VT::ActionSet}, {AK::VerbLit}}, VT::ActionSet},
        {"Filter_Actions_by_Object", OpFamily::Filter, {{AK::Value, VT::ActionSet}, {AK::ObjectLit}}, VT::ActionSet},
        {"Filter_Actions_by_Objects", OpFamily::Filter, {{AK::Value, VT::ActionSet}, {AK::Value, VT::ObjectSet}}, VT::ActionSet},
        {"Filter_Relations_by_Predicate", OpFamily::Filter, {{AK::Value, VT::RelationSet}, {AK::RelationLit}}, VT::RelationSet},

        {"Relate_Objects", OpFamily::Relate, {{AK::SubjectLit}, {AK::RelationLit}}, VT::ObjectSet},
        {"Relate_Subjects", OpFamily::Relate, {{AK::ObjectLit}, {AK::RelationLit}}, VT::ObjectSet},
        {"Relate_Triplets", OpFamily::Relate, {{AK::SubjectLit}, {AK::ObjectLit}}, VT::RelationSet},

        {"Temporal_After", OpFamily::Temporal, {{AK::Value, VT::ActionSet}, {AK::Anchor}}, VT::ActionSet},
        {"Temporal_Before", OpFamily::Temporal, {{AK::Value, VT::ActionSet}, {AK::Anchor}}, VT::ActionSet},
        {"Temporal_While", OpFamily::Temporal, {{AK::Value, VT::ActionSet}, {AK::Anchor}}, VT::ActionSet},

        {"Verify_Actions", OpFamily::Verify, {{AK::Value, VT::ActionSet}, {AK::VerbLit}, {AK::ObjectLit}}, VT::Boolean},
        {"Verify_Objects", OpFamily::Verify, {{AK::Value, VT::ObjectSet}, {AK::ObjectLit}}, VT::Boolean},
        {"Verify_Verbs", OpFamily::Verify, {{AK::Value, VT::VerbSet}, {AK::VerbLit}}, VT::Boolean},
        {"Verify_Relations", OpFamily::Verify, {{AK::Value, VT::RelationSet}, {AK::RelationLit}}, VT::Boolean},
    };
    return table;
}

const OpSignature* find_signature(const std::string& name) {
    for (const auto& sig : op_signatures())
        if (sig.name == name) return &sig;
    return nullptr;
}

const OpSignature& ProgramNode::signature() const {
    const OpSignature* sig = find_signature(op_name);
    if (!sig) throw ParseError("unknown operation '" + op_name + "'");
    return *sig;
}

std::vector<NodePtr> ProgramNode::children() const {
    std::vector<NodePtr> out;
    for (const auto& a : args)
        if (a.node) out.push_back(a.node);
    return out;
}

std::vector<std::string> ProgramNode::literals() const {
    std::vector<std::string> out;
    for (const auto& a : args)
        if (!a.node) out.push_back(a.literal);
    return out;
}

int ProgramNode::node_count() const {
    int n = 1;
    for (const auto& a : args)
        if (a.node) n += a.node->node_count();
    return n;
}

namespace {

bool nodes_equal(const NodePtr& a, const NodePtr& b) {
    if (!a || !b) return a == b;
    if (a->op_name != b->op_name || a->args.size() != b->args.size()) return false;
    for (size_t i = 0; i < a->args.size(); ++i) {
        const auto& x = a->args[i];
        const auto& y = b->args[i];
        if (x.is_literal() != y.is_literal()) return false;
        if (x.is_literal()) {
            if (x.literal != y.literal) return false;
        } else if (!nodes_equal(x.node, y.node)) {
            return false;
        }
    }
    return true;
}

void collect_literals(const NodePtr& node, std::vector<std::string>& out) {
    if (!node) return;
    for (const auto& a : node->args) {
        if (a.is_literal())
            out.push_back(a.literal);
        else
            collect_literals(a.node, out);
    }
}

}  // namespace

bool programs_equal(const FunctionalProgram& a, const FunctionalProgram& b) {
    return a.declared_output_type == b.declared_output_type && nodes_equal(a.root, b.root);
}

std::vector<std::string> program_literals(const FunctionalProgram& p) {
    std::vector<std::string> out;
    collect_literals(p.root, out);
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
    enum Kind { Name, Int, LParen, RParen, Comma, End } kind;
    std::string text;
    size_t pos;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    Token next() {
        while (pos_ < text_.size() && text_[pos_] == ' ') ++pos_;
        size_t start = pos_;
        if (pos_ >= text_.size()) return {Token::End, "", start};
        char c = text_[pos_];
        if (c == '(') { ++pos_; return {Token::LParen, "(", start}; }
        if (c == ')') { ++pos_; return {Token::RParen, ")", start}; }
        if (c == ',') { ++pos_; return {Token::Comma, ",", start}; }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            return {Token::Int, text_.substr(start, pos_ - start), start};
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            // First character per the grammar; digits may follow inside
            // instance ids used as anchor literals.
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            return {Token::Name, text_.substr(start, pos_ - start), start};
        }
        throw ParseError("syntax error at position " + std::to_string(start) + ": unexpected character '" +
                         std::string(1, c) + "'");
    }

private:
    const std::string& text_;
    size_t pos_ = 0;
};

class Parser {
public:
    explicit Parser(const std::string& text) : lexer_(text) { advance(); }

    NodePtr parse() {
        NodePtr root = parse_call_or_source();
        expect(Token::End, "end of input");
        return root;
    }

private:
    void advance() { current_ = lexer_.next(); }

    void expect(Token::Kind kind, const std::string& what) {
        if (current_.kind != kind)
            throw ParseError("syntax error at position " + std::to_string(current_.pos) + ": expected " +
                             what);
        advance();
    }

    NodePtr parse_call_or_source() {
        if (current_.kind != Token::Name)
            throw ParseError("syntax error at position " + std::to_string(current_.pos) +
                             ": expected an operation name");
        std::string name = current_.text;
        size_t name_pos = current_.pos;
        advance();
        if (current_.kind != Token::LParen) {
            if (name == "AllActions") return make_call(name, {});
            throw ParseError("syntax error at position " + std::to_string(name_pos) + ": '" + name +
                             "' is not a call");
        }
        const OpSignature* sig = find_signature(name);
        if (!sig) throw ParseError("unknown operation '" + name + "' at position " + std::to_string(name_pos));
        advance();  // '('
        std::vector<ProgramArg> args;
        if (current_.kind != Token::RParen) {
            args.push_back(parse_arg());
            while (current_.kind == Token::Comma) {
                advance();
                args.push_back(parse_arg());
            }
        }
        expect(Token::RParen, "')'");
        if (args.size() != sig->params.size())
            throw ParseError("arity mismatch: '" + name + "' takes " + std::to_string(sig->params.size()) +
                             " argument(s), got " + std::to_string(args.size()));
        return make_call(name, std::move(args));
    }

    ProgramArg parse_arg() {
        if (current_.kind == Token::Int) {
            ProgramArg a = lit(current_.text);
            advance();
            return a;
        }
        if (current_.kind != Token::Name)
            throw ParseError("syntax error at position " + std::to_string(current_.pos) +
                             ": expected a call or literal");
        // Lookahead decides call vs literal.
        std::string name = current_.text;
        advance();
        if (current_.kind == Token::LParen) {
            const OpSignature* sig = find_signature(name);
            if (!sig) throw ParseError("unknown operation '" + name + "'");
            advance();
            std::vector<ProgramArg> args;
            if (current_.kind != Token::RParen) {
                args.push_back(parse_arg());
                while (current_.kind == Token::Comma) {
                    advance();
                    args.push_back(parse_arg());
                }
            }
            expect(Token::RParen, "')'");
            if (args.size() != sig->params.size())
                throw ParseError("arity mismatch: '" + name + "' takes " +
                                 std::to_string(sig->params.size()) + " argument(s), got " +
                                 std::to_string(args.size()));
            return arg(make_call(name, std::move(args)));
        }
        if (name == "AllActions") return arg(make_call(name, {}));
        return lit(name);
    }

    Lexer lexer_;
    Token current_;
};

void print_node_rec(const ProgramNode& node, std::ostringstream& out) {
    out << node.op_name;
    if (node.op_name == "AllActions" && node.args.empty()) return;  // source literal form
    out << '(';
    for (size_t i = 0; i < node.args.size(); ++i) {
        if (i) out << ", ";
        if (node.args[i].is_literal())
            out << node.args[i].literal;
        else
            print_node_rec(*node.args[i].node, out);
    }
    out << ')';
}

}  // namespace

FunctionalProgram parse_program(const std::string& text) {
    Parser parser(text);
    NodePtr root = parser.parse();
    FunctionalProgram p;
    p.root = root;
    p.declared_output_type = root->signature().result;
    return p;
}

std::string print_node(const ProgramNode& node) {
    std::ostringstream out;
    print_node_rec(node, out);
    return out.str();
}

std::string print_program(const FunctionalProgram& p) {
    if (p.empty()) return "";
    return print_node(*p.root);
}

// ---------------------------------------------------------------------------
// Typecheck

namespace {

bool is_integer_token(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

bool check_node(const ProgramNode& node, const std::string& path, std::string& error) {
    const OpSignature* sig = find_signature(node.op_name);
    if (!sig) {
        error = path + ": unknown operation '" + node.op_name + "'";
        return false;
    }
    if (node.args.size() != sig->params.size()) {
        error = path + ": '" + node.op_name + "' takes " + std::to_string(sig->params.size()) +
                " argument(s), got " + std::to_string(node.args.size());
        return false;
    }
    for (size_t i = 0; i < node.args.size(); ++i) {
        const ParamSpec& spec = sig->params[i];
        const ProgramArg& a = node.args[i];
        std::string child_path = path + "." + std::to_string(i);
        switch (spec.kind) {
            case ArgKind::Value: {
                if (a.is_literal()) {
                    error = child_path + ": '" + node.op_name + "' expects a " +
                            to_string(spec.value_type) + " value, got literal '" + a.literal + "'";
                    return false;
                }
                if (a.node->signature().result != spec.value_type) {
                    error = child_path + ": '" + node.op_name + "' expects " + to_string(spec.value_type) +
                            ", got " + to_string(a.node->signature().result) + " from '" +
                            a.node->op_name + "'";
                    return false;
                }
                if (!check_node(*a.node, child_path, error)) return false;
                break;
            }
            case ArgKind::Anchor: {
                if (a.is_literal()) {
                    if (is_integer_token(a.literal)) {
                        error = child_path + ": anchor must be an action id or a call, got integer";
                        return false;
                    }
                } else {
                    if (a.node->signature().result != ValueType::ActionSet) {
                        error = child_path + ": anchor call must produce an action_set";
                        return false;
                    }
                    if (!check_node(*a.node, child_path, error)) return false;
                }
                break;
            }
            case ArgKind::VerbLit:
            case ArgKind::ObjectLit:
            case ArgKind::SubjectLit:
            case ArgKind::RelationLit: {
                if (!a.is_literal()) {
                    error = child_path + ": '" + node.op_name + "' expects an identifier literal here";
                    return false;
                }
                if (is_integer_token(a.literal)) {
                    error = child_path + ": expected an identifier, got integer '" + a.literal + "'";
                    return false;
                }
                break;
            }
        }
    }
    return true;
}

}  // namespace

TypecheckResult typecheck(const FunctionalProgram& p) {
    if (p.empty()) return {false, "empty program"};
    std::string error;
    if (!check_node(*p.root, "root", error)) return {false, error};
    if (p.root->signature().result != p.declared_output_type)
        return {false, "root: declared output type " + to_string(p.declared_output_type) +
                           " does not match computed " + to_string(p.root->signature().result)};
    return {true, ""};
}

NodePtr make_call(const std::string& op, std::vector<ProgramArg> args) {
    auto node = std::make_shared<ProgramNode>();
    node->op_name = op;
    node->args = std::move(args);
    return node;
}

ProgramArg lit(const std::string& token) { return ProgramArg{token, nullptr}; }

ProgramArg arg(NodePtr node) { return ProgramArg{"", std::move(node)}; }

FunctionalProgram make_program(NodePtr root) {
    FunctionalProgram p;
    p.root = std::move(root);
    if (p.root) p.declared_output_type = p.root->signature().result;
    return p;
}

}  // namespace star
