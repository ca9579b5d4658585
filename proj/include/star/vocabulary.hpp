#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace star {

enum class RelTag { Spatial, Temporal };

// English rendering hints for one identifier. Verbs carry a past form,
// objects an article class ("the" / "some").
struct SurfaceForm {
    std::string lemma;
    std::string past;
    std::string article;
    bool transitive = true;
};

// The closed world every other module draws from: verbs, object classes,
// relationship predicates and the legal verb-object compositions.
// Immutable after load; safe for concurrent readers.
struct Vocabulary {
    std::set<std::string> verbs;
    std::set<std::string> objects;
    std::map<std::string, RelTag> relationships;
    std::set<std::pair<std::string, std::string>> action_predicates;
    std::map<std::string, SurfaceForm> surface_forms;

    bool is_verb(const std::string& v) const { return verbs.count(v) > 0; }
    bool is_object(const std::string& o) const { return objects.count(o) > 0; }
    bool is_relationship(const std::string& r) const { return relationships.count(r) > 0; }
    bool is_spatial(const std::string& r) const;
    bool is_temporal(const std::string& r) const;

    const SurfaceForm& surface(const std::string& id) const;

    std::set<std::string> spatial_relationships() const;
};

// Parses and validates a vocabulary document (JSON text). Throws ParseError
// with a field location for malformed input, ValidationError for duplicate
// identifiers, empty categories, or compositions that reference unknown
// verbs/objects.
Vocabulary load_vocabulary(const std::string& json_text);
Vocabulary load_vocabulary_file(const std::string& path);

// True iff (v, o) is a legal action predicate. Unknown ids return false.
bool validate_composition(const std::string& v, const std::string& o, const Vocabulary& voc);

// All objects composable with v. Throws DanglingIdError for an unknown verb.
std::set<std::string> compositions_of(const std::string& v, const Vocabulary& voc);

// All verbs composable with o (the noun-side mirror of compositions_of).
// Throws DanglingIdError for an unknown object.
std::set<std::string> verbs_for_object(const std::string& o, const Vocabulary& voc);

}  // namespace star
