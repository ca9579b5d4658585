#include "star/qagen.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "star/balance.hpp"
#include "star/errors.hpp"
#include "star/rng.hpp"

namespace star {

using nlohmann::json;

std::string to_string(SituationPolicy p) {
    switch (p) {
        case SituationPolicy::Full: return "full";
        case SituationPolicy::MaskPrediction: return "mask_prediction";
        case SituationPolicy::MaskFeasibility: return "mask_feasibility";
    }
    return "?";
}

namespace {

SituationPolicy policy_from_string(const std::string& s) {
    if (s == "full") return SituationPolicy::Full;
    if (s == "mask_prediction") return SituationPolicy::MaskPrediction;
    if (s == "mask_feasibility") return SituationPolicy::MaskFeasibility;
    throw ParseError("unknown situation policy '" + s + "'");
}

ValueType value_type_from_string(const std::string& s) {
    if (s == "action_set") return ValueType::ActionSet;
    if (s == "object_set") return ValueType::ObjectSet;
    if (s == "verb_set") return ValueType::VerbSet;
    if (s == "relation_set") return ValueType::RelationSet;
    if (s == "boolean") return ValueType::Boolean;
    throw ParseError("unknown value type '" + s + "'");
}

bool text_has(const std::string& text, const std::string& token) {
    return text.find(token) != std::string::npos;
}

}  // namespace

std::vector<QuestionTemplate> load_templates(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("templates: ") + e.what());
    }
    if (!doc.is_array()) throw ParseError("templates: expected a JSON array");

    std::vector<QuestionTemplate> out;
    std::set<std::string> ids;
    for (const auto& jt : doc) {
        QuestionTemplate t;
        try {
            t.id = jt.at("id").get<std::string>();
            t.qtype = qtype_from_string(jt.at("qtype").get<std::string>());
            t.text_pattern = jt.at("text_pattern").get<std::string>();
            t.program_skeleton = jt.at("program_skeleton").get<std::string>();
            t.answer_type = value_type_from_string(jt.at("answer_type").get<std::string>());
            t.policy = policy_from_string(jt.at("situation_policy").get<std::string>());
            if (jt.contains("constraints"))
                for (const auto& c : jt["constraints"]) t.constraints.push_back(c.get<std::string>());
        } catch (const json::exception& e) {
            throw ParseError(std::string("templates: ") + e.what());
        }
        if (!ids.insert(t.id).second) throw ValidationError("duplicate template id '" + t.id + "'");
        if (t.qtype == QType::Prediction && t.policy != SituationPolicy::MaskPrediction)
            throw ValidationError("template '" + t.id + "': prediction questions require mask_prediction");
        if (t.qtype == QType::Feasibility && t.policy != SituationPolicy::MaskFeasibility)
            throw ValidationError("template '" + t.id + "': feasibility questions require mask_feasibility");

        FunctionalProgram skeleton = parse_program(t.program_skeleton);
        if (skeleton.declared_output_type != t.answer_type)
            throw ValidationError("template '" + t.id + "': answer_type does not match the skeleton");
        std::vector<std::string> lits = program_literals(skeleton);
        auto has_lit = [&lits](const std::string& s) {
            return std::find(lits.begin(), lits.end(), s) != lits.end();
        };
        for (const char* ph : {"V", "O", "R"})
            if (text_has(t.text_pattern, std::string("[") + ph + "]") && !has_lit(ph))
                throw ValidationError("template '" + t.id + "': placeholder [" + std::string(ph) +
                                      "] missing from the program skeleton");
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<QuestionTemplate> load_templates_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("templates: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return load_templates(ss.str());
}

std::string item_template_key(const QAItem& item) {
    size_t first = item.id.find('.');
    size_t last = item.id.rfind('.');
    if (first == std::string::npos || last == first) return "";
    return item.id.substr(first + 1, last - first - 1);
}

AnswerStats answer_stats(const std::vector<QAItem>& items) {
    AnswerStats stats;
    for (const auto& item : items) stats[item.qtype][item.options[item.correct_index]] += 1;
    return stats;
}

// ---------------------------------------------------------------------------
// Instantiation

namespace {

NodePtr substitute_literals(const NodePtr& node, const Binding& b) {
    std::vector<ProgramArg> args;
    for (const auto& a : node->args) {
        if (a.is_literal()) {
            auto it = b.find(a.literal);
            args.push_back(lit(it == b.end() ? a.literal : it->second));
        } else {
            args.push_back(arg(substitute_literals(a.node, b)));
        }
    }
    return make_call(node->op_name, std::move(args));
}

}  // namespace

Instantiated instantiate(const QuestionTemplate& t, const Binding& b) {
    std::string text = t.text_pattern;
    bool anchor_past = t.qtype == QType::Interaction || t.qtype == QType::Sequence;

    auto replace_all = [&text](const std::string& from, const std::string& to) {
        size_t pos = 0;
        while ((pos = text.find(from, pos)) != std::string::npos) {
            text.replace(pos, from.size(), to);
            pos += to.size();
        }
    };

    for (const char* ph : {"P", "V", "O", "R"}) {
        std::string token = std::string("[") + ph + "]";
        if (!text_has(text, token)) continue;
        auto it = b.find(ph);
        if (it == b.end()) throw GenerationError("missing placeholder " + token);
        if (std::string(ph) == "P")
            replace_all(token, "{person}");
        else if (std::string(ph) == "V")
            replace_all(token, std::string("{") + (anchor_past ? "v_past" : "v_pres") + ":" + it->second + "}");
        else if (std::string(ph) == "O")
            replace_all(token, "{obj:" + it->second + "}");
        else
            replace_all(token, "{rel:" + it->second + "}");
    }

    FunctionalProgram skeleton = parse_program(t.program_skeleton);
    for (const auto& literal : program_literals(skeleton)) {
        if ((literal == "V" || literal == "O" || literal == "R") && !b.count(literal))
            throw GenerationError("missing placeholder [" + literal + "]");
    }
    Instantiated inst;
    inst.raw_text = text;
    inst.program = make_program(substitute_literals(skeleton.root, b));
    return inst;
}

std::string generate_answer(const FunctionalProgram& p, const SituationHypergraph& gt, QType qtype,
                            const Vocabulary& voc) {
    ExecValue value = execute(p, gt, voc);
    if (value.is_set() && value.size() != 1)
        throw GenerationError("non-singleton answer (" + std::to_string(value.size()) + " elements)");
    return render_option(value, gt, qtype, voc);
}

std::optional<std::string> answer_witness_action(const FunctionalProgram& p,
                                                 const SituationHypergraph& gt, const Vocabulary& voc) {
    ExecutionTrace trace = execute_traced(p, gt, voc);
    if (trace.result.type == ValueType::ActionSet && trace.result.ids.size() == 1)
        return *trace.result.ids.begin();
    for (const auto& entry : trace.entries) {
        if (entry.path == "root.0" && entry.value.type == ValueType::ActionSet &&
            entry.value.ids.size() == 1)
            return *entry.value.ids.begin();
    }
    return std::nullopt;
}

namespace {

// Pre-order path of the first Temporal_* node, if any.
bool find_temporal_path(const NodePtr& node, const std::string& path, std::string& out) {
    if (node->op_name.rfind("Temporal_", 0) == 0) {
        out = path;
        return true;
    }
    for (size_t i = 0; i < node->args.size(); ++i) {
        if (node->args[i].is_literal()) continue;
        if (find_temporal_path(node->args[i].node, path + "." + std::to_string(i), out)) return true;
    }
    return false;
}

const ProgramNode* node_at(const NodePtr& root, const std::string& path) {
    const ProgramNode* cur = root.get();
    size_t pos = 4;  // skip "root"
    while (pos < path.size()) {
        size_t next = path.find('.', pos + 1);
        size_t idx = static_cast<size_t>(std::stoul(path.substr(pos + 1, next - pos - 1)));
        cur = cur->args[idx].node.get();
        pos = next == std::string::npos ? path.size() : next;
    }
    return cur;
}

}  // namespace

std::optional<std::string> prediction_mask_target(const FunctionalProgram& p,
                                                  const SituationHypergraph& gt, const Vocabulary& voc) {
    std::string temporal_path;
    if (find_temporal_path(p.root, "root", temporal_path)) {
        const ProgramNode* temporal = node_at(p.root, temporal_path);
        const ProgramArg& anchor = temporal->args[1];
        if (anchor.is_literal()) {
            if (!gt.find_action(anchor.literal)) return std::nullopt;
            return anchor.literal;
        }
        std::string anchor_path = temporal_path + ".1";
        ExecutionTrace trace = execute_traced(p, gt, voc);
        for (const auto& entry : trace.entries)
            if (entry.path == anchor_path && entry.value.type == ValueType::ActionSet &&
                entry.value.ids.size() == 1)
                return *entry.value.ids.begin();
        return std::nullopt;
    }
    return answer_witness_action(p, gt, voc);
}

FunctionalProgram verify_form(const FunctionalProgram& p, const OptionComponents& components) {
    switch (p.declared_output_type) {
        case ValueType::ActionSet:
            if (!components.verb || !components.object)
                throw GenerationError("option lacks a verb-object reading");
            return make_program(
                make_call("Verify_Actions", {arg(p.root), lit(*components.verb), lit(*components.object)}));
        case ValueType::ObjectSet:
            if (!components.object) throw GenerationError("option lacks an object reading");
            return make_program(make_call("Verify_Objects", {arg(p.root), lit(*components.object)}));
        case ValueType::VerbSet:
            if (!components.verb) throw GenerationError("option lacks a verb reading");
            return make_program(make_call("Verify_Verbs", {arg(p.root), lit(*components.verb)}));
        default:
            throw GenerationError("no verify form for this answer type");
    }
}

// ---------------------------------------------------------------------------
// Binding extraction

namespace {

struct SituationContent {
    std::set<std::string> verbs;
    std::set<std::string> objects;  // node classes and action objects, no person
    std::vector<std::pair<std::string, std::string>> predicates;  // distinct, sorted
    std::vector<std::pair<std::string, std::string>> related;     // (object class, spatial rel) seen in triplets
};

SituationContent situation_content(const SituationHypergraph& g, const Vocabulary& voc) {
    SituationContent c;
    std::set<std::pair<std::string, std::string>> preds;
    for (const auto& a : g.actions) {
        c.verbs.insert(a.verb);
        c.objects.insert(a.object);
        preds.insert({a.verb, a.object});
    }
    for (const auto& e : g.entities)
        if (e.kind == NodeKind::Object) c.objects.insert(e.cls);
    c.predicates.assign(preds.begin(), preds.end());

    std::map<std::string, std::string> node_class;
    for (const auto& e : g.entities) node_class[e.id] = e.cls;
    std::set<std::pair<std::string, std::string>> rel;
    for (const auto& f : g.frames)
        for (const auto& t : f.triplets) {
            if (!voc.is_spatial(t.predicate)) continue;
            auto it = node_class.find(t.object);
            if (it == node_class.end() || it->second == kPersonClass) continue;
            rel.insert({it->second, t.predicate});
        }
    c.related.assign(rel.begin(), rel.end());
    return c;
}

bool constraints_hold(const QuestionTemplate& t, const Binding& b, const SituationHypergraph& gt) {
    for (const auto& c : t.constraints) {
        if (c == "unique_predicate_action") {
            int n = 0;
            for (const auto& a : gt.actions)
                if (a.verb == b.at("V") && a.object == b.at("O")) ++n;
            if (n != 1) return false;
        } else if (c == "unique_object_action") {
            int n = 0;
            for (const auto& a : gt.actions)
                if (a.object == b.at("O")) ++n;
            if (n != 1) return false;
        } else if (c == "single_action") {
            if (gt.actions.size() != 1) return false;
        } else {
            throw ValidationError("unknown template constraint '" + c + "'");
        }
    }
    return true;
}

// Applies the template's situation policy for the given witness action.
SituationHypergraph apply_policy(const SituationHypergraph& gt, SituationPolicy policy,
                                 const std::string& witness) {
    switch (policy) {
        case SituationPolicy::Full: return gt;
        case SituationPolicy::MaskPrediction: return mask_for_prediction(gt, witness);
        case SituationPolicy::MaskFeasibility: return mask_for_feasibility(gt, witness);
    }
    throw ValidationError("bad policy");
}

bool binding_is_valid(const QuestionTemplate& t, const Binding& b, const SituationHypergraph& gt,
                      const Vocabulary& voc) {
    Instantiated inst;
    try {
        inst = instantiate(t, b);
    } catch (const GenerationError&) {
        return false;
    }
    if (!typecheck(inst.program).ok) return false;
    if (!constraints_hold(t, b, gt)) return false;

    ExecValue value;
    try {
        value = execute(inst.program, gt, voc);
    } catch (const Error&) {
        return false;
    }
    if (!value.is_set() || value.size() != 1) return false;

    if (t.policy != SituationPolicy::Full) {
        std::optional<std::string> target;
        try {
            target = t.policy == SituationPolicy::MaskPrediction
                         ? prediction_mask_target(inst.program, gt, voc)
                         : answer_witness_action(inst.program, gt, voc);
        } catch (const Error&) {
            return false;
        }
        if (!target) return false;
        SituationHypergraph masked;
        try {
            masked = apply_policy(gt, t.policy, *target);
        } catch (const Error&) {
            return false;
        }
        try {
            execute(inst.program, masked, voc);
            return false;  // still answerable with the mask applied
        } catch (const Unanswerable&) {
            // expected: the answer must not be recoverable from the mask
        } catch (const Error&) {
            return false;
        }
    }
    return true;
}

}  // namespace

std::vector<Binding> extract_bindings(const SituationHypergraph& gt, const QuestionTemplate& t,
                                      const Vocabulary& voc) {
    bool has_v = text_has(t.text_pattern, "[V]");
    bool has_o = text_has(t.text_pattern, "[O]");
    bool has_r = text_has(t.text_pattern, "[R]");
    SituationContent content = situation_content(gt, voc);

    std::vector<Binding> candidates;
    Binding base{{"P", kPersonClass}};
    if (has_v && has_o) {
        for (const auto& [v, o] : content.predicates) {
            Binding b = base;
            b["V"] = v;
            b["O"] = o;
            candidates.push_back(b);
        }
    } else if (has_o && has_r) {
        for (const auto& [o, r] : content.related) {
            Binding b = base;
            b["O"] = o;
            b["R"] = r;
            candidates.push_back(b);
        }
    } else if (has_v) {
        for (const auto& v : content.verbs) {
            Binding b = base;
            b["V"] = v;
            candidates.push_back(b);
        }
    } else if (has_o) {
        for (const auto& o : content.objects) {
            Binding b = base;
            b["O"] = o;
            candidates.push_back(b);
        }
    } else {
        candidates.push_back(base);
    }

    std::vector<Binding> out;
    for (const auto& b : candidates)
        if (binding_is_valid(t, b, gt, voc)) out.push_back(b);
    return out;
}

// ---------------------------------------------------------------------------
// Distractors

namespace {

bool option_fails_program(const FunctionalProgram& p, const OptionComponents& comp,
                          const SituationHypergraph& gt, const Vocabulary& voc) {
    FunctionalProgram check;
    try {
        check = verify_form(p, comp);
    } catch (const GenerationError&) {
        return false;
    }
    try {
        ExecValue v = execute(check, gt, voc);
        return !v.boolean;
    } catch (const Error&) {
        return false;
    }
}

}  // namespace

std::string gen_compositional_distractor(const SituationHypergraph& gt, const FunctionalProgram& p,
                                         const std::string& answer, ValueType answer_type, QType qtype,
                                         const std::optional<std::string>& context_verb,
                                         const Vocabulary& voc, uint64_t seed) {
    SituationContent content = situation_content(gt, voc);
    std::vector<std::string> options;

    if (answer_type == ValueType::ActionSet) {
        for (const auto& v : content.verbs) {
            for (const auto& o : content.objects) {
                if (!validate_composition(v, o, voc)) continue;
                std::string phrase = render_action_phrase(v, o, qtype, voc);
                if (phrase == answer) continue;
                if (!option_fails_program(p, OptionComponents{v, o}, gt, voc)) continue;
                options.push_back(phrase);
            }
        }
    } else if (answer_type == ValueType::ObjectSet) {
        for (const auto& o : content.objects) {
            if (context_verb && !validate_composition(*context_verb, o, voc)) continue;
            std::string phrase = render_object_phrase(o, voc);
            if (phrase == answer) continue;
            if (!option_fails_program(p, OptionComponents{context_verb, o}, gt, voc)) continue;
            options.push_back(phrase);
        }
    } else {
        throw GenerationError("no compositional strategy for this answer type");
    }

    if (options.empty()) throw GenerationError("no compositional candidate in this situation");
    std::sort(options.begin(), options.end());
    options.erase(std::unique(options.begin(), options.end()), options.end());
    Rng rng(seed);
    return options[static_cast<size_t>(rng.below(options.size()))];
}

std::string gen_random_distractor(const std::vector<SituationHypergraph>& corpus,
                                  const std::string& own_situation_id, const std::string& answer,
                                  const std::set<std::string>& exclude, ValueType answer_type, QType qtype,
                                  const std::optional<std::string>& context_verb, const Vocabulary& voc,
                                  uint64_t seed) {
    if (corpus.size() < 2) throw GenerationError("random distractor needs at least 2 situations");

    std::set<std::string> options;
    for (const auto& g : corpus) {
        if (g.id == own_situation_id) continue;
        for (const auto& a : g.actions) {
            std::string phrase;
            if (answer_type == ValueType::ActionSet) {
                phrase = render_action_phrase(a.verb, a.object, qtype, voc);
            } else if (answer_type == ValueType::ObjectSet) {
                if (context_verb && !validate_composition(*context_verb, a.object, voc)) continue;
                phrase = render_object_phrase(a.object, voc);
            } else {
                throw GenerationError("no random strategy for this answer type");
            }
            if (phrase == answer || exclude.count(phrase)) continue;
            options.insert(phrase);
        }
    }
    if (options.empty()) throw GenerationError("random distractor exhausted the corpus");
    std::vector<std::string> sorted(options.begin(), options.end());
    Rng rng(seed);
    return sorted[static_cast<size_t>(rng.below(sorted.size()))];
}

std::string gen_frequent_distractor(const AnswerStats& stats, QType qtype, const std::string& answer) {
    auto group = stats.find(qtype);
    if (group == stats.end() || group->second.empty())
        throw GenerationError("empty answer stats for question type '" + to_string(qtype) + "'");
    std::vector<std::pair<std::string, int>> ranked(group->second.begin(), group->second.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return std::tie(b.second, a.first) < std::tie(a.second, b.first);
    });
    for (const auto& [content, count] : ranked)
        if (content != answer) return content;
    throw GenerationError("no frequent option distinct from the answer");
}

QAItem assemble_qa(const std::string& id, const std::string& situation_id, QType qtype,
                   const std::string& question, const FunctionalProgram& program,
                   const std::string& answer,
                   const std::array<std::pair<std::string, std::string>, 3>& distractors, uint64_t seed) {
    std::vector<std::pair<std::string, std::string>> slots;
    slots.push_back({answer, "answer"});
    for (const auto& d : distractors) slots.push_back(d);

    std::set<std::string> distinct;
    for (const auto& [text, tag] : slots)
        if (!distinct.insert(text).second) throw GenerationError("duplicate option '" + text + "'");

    Rng rng(seed);
    rng.shuffle(slots);

    QAItem item;
    item.id = id;
    item.situation_id = situation_id;
    item.qtype = qtype;
    item.question = question;
    item.program = program;
    for (size_t i = 0; i < 4; ++i) {
        item.options[i] = slots[i].first;
        item.provenance[i] = slots[i].second;
        if (slots[i].second == "answer") item.correct_index = static_cast<int>(i);
    }
    return item;
}

// ---------------------------------------------------------------------------
// Two-pass corpus generation

namespace {

struct PendingItem {
    std::string id;
    std::string situation_id;
    QType qtype = QType::Interaction;
    ValueType answer_type = ValueType::ActionSet;
    std::optional<std::string> ctx_verb;
    std::string question;
    FunctionalProgram program;
    std::string answer;
    std::pair<std::string, std::string> d_comp;  // text, provenance
    std::pair<std::string, std::string> d_rand;
    SituationHypergraph visible;
    SituationHypergraph gt;
    std::optional<std::string> mask_target;
};

std::vector<PendingItem> generate_for_situation(const SituationHypergraph& source,
                                                const std::vector<SituationHypergraph>& all_sources,
                                                const std::vector<QuestionTemplate>& templates,
                                                const Vocabulary& voc, const PropagationRules& rules,
                                                const GenConfig& cfg, uint64_t seed) {
    std::vector<PendingItem> out;
    SituationHypergraph gt = propagate_relations(source, voc, rules);

    for (const auto& t : templates) {
        std::vector<Binding> bindings = extract_bindings(gt, t, voc);
        Rng pick(derive_seed(seed, "bind." + source.id + "." + t.id));
        pick.shuffle(bindings);
        if (bindings.size() > static_cast<size_t>(cfg.bindings_per_template))
            bindings.resize(static_cast<size_t>(cfg.bindings_per_template));

        for (size_t k = 0; k < bindings.size(); ++k) {
            const Binding& b = bindings[k];
            std::string item_id = source.id + "." + t.id + "." + std::to_string(k);
            PendingItem item;
            item.id = item_id;
            item.situation_id = source.id;
            item.qtype = t.qtype;
            item.answer_type = t.answer_type;

            Instantiated inst = instantiate(t, b);
            item.program = inst.program;
            item.question = expand_language(inst.raw_text, voc);
            item.answer = generate_answer(inst.program, gt, t.qtype, voc);

            item.gt = gt;
            item.gt.id = item_id;
            if (t.policy == SituationPolicy::Full) {
                item.visible = item.gt;
            } else {
                std::optional<std::string> target = t.policy == SituationPolicy::MaskPrediction
                                                        ? prediction_mask_target(inst.program, gt, voc)
                                                        : answer_witness_action(inst.program, gt, voc);
                item.visible = apply_policy(gt, t.policy, *target);
                item.visible.id = item_id;
                item.mask_target = target;
            }

            std::optional<std::string> ctx_verb;
            if (auto it = b.find("V"); it != b.end()) ctx_verb = it->second;
            item.ctx_verb = ctx_verb;

            try {
                item.d_comp = {gen_compositional_distractor(gt, inst.program, item.answer, t.answer_type,
                                                            t.qtype, ctx_verb, voc,
                                                            derive_seed(seed, "comp." + item_id)),
                               "compositional"};
            } catch (const GenerationError&) {
                // Single-fact situations cannot contradict themselves; fall
                // back to a second random option and record it as such.
                try {
                    item.d_comp = {gen_random_distractor(all_sources, source.id, item.answer, {},
                                                         t.answer_type, t.qtype, ctx_verb, voc,
                                                         derive_seed(seed, "compfb." + item_id)),
                                   "random"};
                } catch (const GenerationError&) {
                    continue;
                }
            }

            try {
                item.d_rand = {gen_random_distractor(all_sources, source.id, item.answer,
                                                     {item.d_comp.first}, t.answer_type, t.qtype, ctx_verb,
                                                     voc, derive_seed(seed, "rand." + item_id)),
                               "random"};
            } catch (const GenerationError&) {
                continue;
            }
            out.push_back(std::move(item));
        }
    }
    return out;
}

}  // namespace

GenResult generate_corpus(const std::vector<SituationHypergraph>& situations,
                          const std::vector<QuestionTemplate>& templates, const Vocabulary& voc,
                          const PropagationRules& rules, const GenConfig& cfg, uint64_t seed) {
    // Pass 1: per-situation items, parallel over situations with results
    // stored by situation index so the reduce order is fixed.
    std::vector<std::vector<PendingItem>> slots(situations.size());
    int workers = std::max(1, cfg.workers);
    std::atomic<size_t> cursor{0};
    auto work = [&]() {
        while (true) {
            size_t i = cursor.fetch_add(1);
            if (i >= situations.size()) break;
            slots[i] = generate_for_situation(situations[i], situations, templates, voc, rules, cfg, seed);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    std::vector<PendingItem> pending;
    for (auto& slot : slots)
        for (auto& item : slot) pending.push_back(std::move(item));

    // Pass 2: frequent distractors need corpus-level answer statistics,
    // which only exist once every answer is generated.
    AnswerStats stats;
    for (const auto& item : pending) stats[item.qtype][item.answer] += 1;

    GenResult result;
    for (const auto& item : pending) {
        std::pair<std::string, std::string> d_freq;
        std::set<std::string> taken{item.answer, item.d_comp.first, item.d_rand.first};
        bool found = false;
        auto group = stats.find(item.qtype);
        if (group != stats.end()) {
            std::vector<std::pair<std::string, int>> ranked(group->second.begin(), group->second.end());
            std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
                return std::tie(b.second, a.first) < std::tie(a.second, b.first);
            });
            for (const auto& [content, count] : ranked) {
                if (taken.count(content)) continue;
                // Options within one question share a shape; skip answers of
                // the group's other answer type.
                auto comp = parse_option(content, voc);
                if (!comp) continue;
                if (item.answer_type == ValueType::ActionSet && !(comp->verb && comp->object)) continue;
                if (item.answer_type == ValueType::ObjectSet && !(comp->object && !comp->verb)) continue;
                d_freq = {content, "frequent"};
                found = true;
                break;
            }
        }
        if (!found) {
            try {
                d_freq = {gen_random_distractor(situations, item.situation_id, item.answer, taken,
                                                item.answer_type, item.qtype, item.ctx_verb, voc,
                                                derive_seed(seed, "freqfb." + item.id)),
                          "random"};
            } catch (const GenerationError&) {
                continue;
            }
        }

        QAItem qa = assemble_qa(item.id, item.situation_id, item.qtype, item.question, item.program,
                                item.answer, {item.d_comp, item.d_rand, d_freq},
                                derive_seed(seed, "assemble." + item.id));
        result.raw_items.push_back(qa);
        result.visible.emplace(item.id, item.visible);
        result.gt.emplace(item.id, item.gt);
        if (item.mask_target) result.mask_target.emplace(item.id, *item.mask_target);
    }

    if (cfg.balance_tolerance) {
        std::vector<QAItem> filtered =
            filter_compositionality(result.raw_items, voc, cfg.min_compositions);
        result.items = resample_balance(filtered, *cfg.balance_tolerance,
                                        derive_seed(seed, "resample"), BalanceGranularity::PerQType);
    } else {
        result.items = result.raw_items;
    }
    return result;
}

// ---------------------------------------------------------------------------
// QA corpus serialization

std::string serialize_qa(const std::vector<QAItem>& items) {
    json arr = json::array();
    for (const auto& item : items) {
        json j;
        j["id"] = item.id;
        j["situation_id"] = item.situation_id;
        j["qtype"] = to_string(item.qtype);
        j["question"] = item.question;
        j["options"] = item.options;
        j["correct_index"] = item.correct_index;
        j["program"] = print_program(item.program);
        j["provenance"] = item.provenance;
        if (!item.split.empty()) j["split"] = item.split;
        arr.push_back(j);
    }
    return arr.dump(2) + "\n";
}

std::vector<QAItem> parse_qa(const std::string& json_text) {
    json arr;
    try {
        arr = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("qa corpus: ") + e.what());
    }
    if (!arr.is_array()) throw ParseError("qa corpus: expected a JSON array");
    std::vector<QAItem> out;
    for (const auto& j : arr) {
        QAItem item;
        try {
            item.id = j.at("id").get<std::string>();
            item.situation_id = j.at("situation_id").get<std::string>();
            item.qtype = qtype_from_string(j.at("qtype").get<std::string>());
            item.question = j.at("question").get<std::string>();
            for (size_t i = 0; i < 4; ++i) item.options[i] = j.at("options").at(i).get<std::string>();
            item.correct_index = j.at("correct_index").get<int>();
            item.program = parse_program(j.at("program").get<std::string>());
            for (size_t i = 0; i < 4; ++i) item.provenance[i] = j.at("provenance").at(i).get<std::string>();
            item.split = j.value("split", "");
        } catch (const json::exception& e) {
            throw ParseError(std::string("qa corpus: ") + e.what());
        }
        if (item.correct_index < 0 || item.correct_index > 3)
            throw ValidationError("item '" + item.id + "': correct_index out of range");
        out.push_back(std::move(item));
    }
    return out;
}

std::vector<QAItem> load_qa_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("qa corpus: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_qa(ss.str());
}

}  // namespace star
