#include "star/vocabulary.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "star/errors.hpp"

namespace star {

using nlohmann::json;

bool Vocabulary::is_spatial(const std::string& r) const {
    auto it = relationships.find(r);
    return it != relationships.end() && it->second == RelTag::Spatial;
}

bool Vocabulary::is_temporal(const std::string& r) const {
    auto it = relationships.find(r);
    return it != relationships.end() && it->second == RelTag::Temporal;
}

const SurfaceForm& Vocabulary::surface(const std::string& id) const {
    auto it = surface_forms.find(id);
    if (it == surface_forms.end()) throw DanglingIdError("no surface form for '" + id + "'");
    return it->second;
}

std::set<std::string> Vocabulary::spatial_relationships() const {
    std::set<std::string> out;
    for (const auto& [r, tag] : relationships)
        if (tag == RelTag::Spatial) out.insert(r);
    return out;
}

namespace {

void require_key(const json& j, const char* key) {
    if (!j.contains(key))
        throw ParseError(std::string("vocabulary: missing top-level key '") + key + "'");
}

std::set<std::string> read_id_list(const json& arr, const std::string& category) {
    if (!arr.is_array())
        throw ParseError("vocabulary: '" + category + "' must be an array");
    std::set<std::string> out;
    for (const auto& item : arr) {
        if (!item.is_string())
            throw ParseError("vocabulary: non-string identifier in '" + category + "'");
        std::string id = item.get<std::string>();
        if (!out.insert(id).second)
            throw ValidationError("duplicate identifier '" + id + "' in " + category);
    }
    if (out.empty()) throw ValidationError("empty category: " + category);
    return out;
}

}  // namespace

Vocabulary load_vocabulary(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("vocabulary: ") + e.what());
    }

    for (const char* key : {"verbs", "objects", "relationships", "action_predicates", "surface_forms"})
        require_key(doc, key);

    Vocabulary voc;
    voc.verbs = read_id_list(doc["verbs"], "verbs");
    voc.objects = read_id_list(doc["objects"], "objects");

    if (!doc["relationships"].is_array() || doc["relationships"].empty())
        throw ValidationError("empty category: relationships");
    for (const auto& rel : doc["relationships"]) {
        if (!rel.is_object() || !rel.contains("id") || !rel.contains("tag"))
            throw ParseError("vocabulary: relationship entries need 'id' and 'tag'");
        std::string id = rel["id"].get<std::string>();
        std::string tag = rel["tag"].get<std::string>();
        RelTag t;
        if (tag == "spatial")
            t = RelTag::Spatial;
        else if (tag == "temporal")
            t = RelTag::Temporal;
        else
            throw ParseError("vocabulary: relationship '" + id + "' has unknown tag '" + tag + "'");
        if (!voc.relationships.emplace(id, t).second)
            throw ValidationError("duplicate identifier '" + id + "' in relationships");
    }

    if (!doc["action_predicates"].is_array() || doc["action_predicates"].empty())
        throw ValidationError("empty category: action_predicates");
    for (const auto& pair : doc["action_predicates"]) {
        if (!pair.is_array() || pair.size() != 2)
            throw ParseError("vocabulary: action_predicates entries must be [verb, object] pairs");
        std::string v = pair[0].get<std::string>();
        std::string o = pair[1].get<std::string>();
        if (!voc.verbs.count(v))
            throw ValidationError("composition (" + v + ", " + o + ") references unknown verb '" + v + "'");
        if (!voc.objects.count(o))
            throw ValidationError("composition (" + v + ", " + o + ") references unknown object '" + o + "'");
        if (!voc.action_predicates.emplace(v, o).second)
            throw ValidationError("duplicate action predicate (" + v + ", " + o + ")");
    }

    if (!doc["surface_forms"].is_object())
        throw ParseError("vocabulary: 'surface_forms' must be an object");
    for (const auto& [id, form] : doc["surface_forms"].items()) {
        SurfaceForm sf;
        if (!form.contains("lemma"))
            throw ParseError("vocabulary: surface form for '" + id + "' has no lemma");
        sf.lemma = form["lemma"].get<std::string>();
        sf.past = form.value("past", sf.lemma);
        sf.article = form.value("article", "");
        sf.transitive = form.value("transitive", true);
        voc.surface_forms.emplace(id, sf);
    }

    auto check_surface = [&voc](const std::string& id, const char* category) {
        if (!voc.surface_forms.count(id))
            throw ValidationError(std::string("missing surface form for ") + category + " '" + id + "'");
    };
    for (const auto& v : voc.verbs) check_surface(v, "verb");
    for (const auto& o : voc.objects) check_surface(o, "object");
    for (const auto& [r, tag] : voc.relationships) check_surface(r, "relationship");

    return voc;
}

Vocabulary load_vocabulary_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("vocabulary: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return load_vocabulary(ss.str());
}

bool validate_composition(const std::string& v, const std::string& o, const Vocabulary& voc) {
    return voc.action_predicates.count({v, o}) > 0;
}

std::set<std::string> compositions_of(const std::string& v, const Vocabulary& voc) {
    if (!voc.verbs.count(v)) throw DanglingIdError("unknown verb '" + v + "'");
    std::set<std::string> out;
    for (const auto& [pv, po] : voc.action_predicates)
        if (pv == v) out.insert(po);
    return out;
}

std::set<std::string> verbs_for_object(const std::string& o, const Vocabulary& voc) {
    if (!voc.objects.count(o)) throw DanglingIdError("unknown object '" + o + "'");
    std::set<std::string> out;
    for (const auto& [pv, po] : voc.action_predicates)
        if (po == o) out.insert(pv);
    return out;
}

}  // namespace star
