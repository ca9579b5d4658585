#include "star/surface.hpp"

#include <sstream>

#include "star/errors.hpp"

namespace star {

std::string to_string(QType q) {
    switch (q) {
        case QType::Interaction: return "interaction";
        case QType::Sequence: return "sequence";
        case QType::Prediction: return "prediction";
        case QType::Feasibility: return "feasibility";
    }
    return "?";
}

QType qtype_from_string(const std::string& s) {
    if (s == "interaction") return QType::Interaction;
    if (s == "sequence") return QType::Sequence;
    if (s == "prediction") return QType::Prediction;
    if (s == "feasibility") return QType::Feasibility;
    throw ParseError("unknown question type '" + s + "'");
}

namespace {

std::string object_with_article(const std::string& id, const Vocabulary& voc) {
    const SurfaceForm& sf = voc.surface(id);
    if (sf.article.empty()) return sf.lemma;
    return sf.article + " " + sf.lemma;
}

std::string resolve_marker(const std::string& kind, const std::string& id, const Vocabulary& voc) {
    if (kind == "person") return "the person";
    if (kind == "v_past") return voc.surface(id).past;
    if (kind == "v_pres" || kind == "v_inf") return voc.surface(id).lemma;
    if (kind == "obj") return object_with_article(id, voc);
    if (kind == "rel") return voc.surface(id).lemma;
    throw ParseError("unknown surface marker '{" + kind + "}'");
}

}  // namespace

std::string expand_language(const std::string& raw, const Vocabulary& voc) {
    std::string out;
    out.reserve(raw.size());
    size_t i = 0;
    while (i < raw.size()) {
        if (raw[i] != '{') {
            out.push_back(raw[i++]);
            continue;
        }
        size_t close = raw.find('}', i);
        if (close == std::string::npos) {
            out.append(raw.substr(i));
            break;
        }
        std::string marker = raw.substr(i + 1, close - i - 1);
        size_t colon = marker.find(':');
        std::string kind = colon == std::string::npos ? marker : marker.substr(0, colon);
        std::string id = colon == std::string::npos ? "" : marker.substr(colon + 1);
        out.append(resolve_marker(kind, id, voc));
        i = close + 1;
    }
    return out;
}

bool has_placeholder_tokens(const std::string& text) {
    for (const char* tok : {"[P]", "[O]", "[V]", "[R]"})
        if (text.find(tok) != std::string::npos) return true;
    return text.find('{') != std::string::npos;
}

namespace {

std::string verb_marker(QType qtype) {
    return (qtype == QType::Interaction || qtype == QType::Sequence) ? "v_past" : "v_inf";
}

}  // namespace

std::string render_value_raw(const ExecValue& value, const SituationHypergraph& graph, QType qtype) {
    std::ostringstream out;
    switch (value.type) {
        case ValueType::ActionSet: {
            bool first = true;
            for (const auto& id : value.ids) {
                const ActionHyperedge* a = graph.find_action(id);
                if (!a) throw DanglingIdError("action id '" + id + "' does not resolve in the graph");
                if (!first) out << " and ";
                out << "{" << verb_marker(qtype) << ":" << a->verb << "} {obj:" << a->object << "}";
                first = false;
            }
            break;
        }
        case ValueType::ObjectSet:
        case ValueType::VerbSet: {
            bool first = true;
            for (const auto& id : value.ids) {
                if (!first) out << " and ";
                if (value.type == ValueType::ObjectSet)
                    out << "{obj:" << id << "}";
                else
                    out << "{" << verb_marker(qtype) << ":" << id << "}";
                first = false;
            }
            break;
        }
        case ValueType::RelationSet: {
            bool first = true;
            for (const auto& t : value.triplets) {
                if (!first) out << " and ";
                out << t.subject << " {rel:" << t.predicate << "} " << t.object;
                first = false;
            }
            break;
        }
        case ValueType::Boolean:
            out << (value.boolean ? "yes" : "no");
            break;
    }
    return out.str();
}

std::string render_option(const ExecValue& value, const SituationHypergraph& graph, QType qtype,
                          const Vocabulary& voc) {
    return expand_language(render_value_raw(value, graph, qtype), voc);
}

std::string render_action_phrase(const std::string& verb, const std::string& object, QType qtype,
                                 const Vocabulary& voc) {
    std::string raw = "{" + verb_marker(qtype) + ":" + verb + "} {obj:" + object + "}";
    return expand_language(raw, voc);
}

std::string render_object_phrase(const std::string& object, const Vocabulary& voc) {
    return expand_language("{obj:" + object + "}", voc);
}

std::optional<OptionComponents> parse_option(const std::string& option, const Vocabulary& voc) {
    // Object-only options: "the cup" / "some food".
    for (const auto& o : voc.objects) {
        if (option == object_with_article(o, voc)) return OptionComponents{std::nullopt, o};
    }
    // Action phrases: "<verb form> <article> <object lemma>".
    for (const auto& v : voc.verbs) {
        const SurfaceForm& vf = voc.surface(v);
        for (const std::string& form : {vf.past, vf.lemma}) {
            if (option.rfind(form + " ", 0) != 0) continue;
            std::string rest = option.substr(form.size() + 1);
            for (const auto& o : voc.objects) {
                if (rest == object_with_article(o, voc)) return OptionComponents{v, o};
            }
        }
    }
    // Verb-only options.
    for (const auto& v : voc.verbs) {
        const SurfaceForm& vf = voc.surface(v);
        if (option == vf.past || option == vf.lemma) return OptionComponents{v, std::nullopt};
    }
    return std::nullopt;
}

}  // namespace star
