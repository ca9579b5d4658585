#include <string>

#include "doctest.h"
#include "helpers.hpp"
#include "star/errors.hpp"
#include "star/vocabulary.hpp"

using namespace star;
using star::testing::default_vocabulary;

TEST_CASE("default vocabulary has the expected category sizes") {
    const Vocabulary& voc = default_vocabulary();
    CHECK(voc.objects.size() == 28);
    CHECK(voc.relationships.size() == 24);
    CHECK(voc.action_predicates.size() == 111);
    CHECK(!voc.verbs.empty());
}

TEST_CASE("known compositions resolve") {
    const Vocabulary& voc = default_vocabulary();
    CHECK(validate_composition("grasp", "doorknob", voc));
    CHECK(validate_composition("wear", "clothes", voc));
    CHECK(compositions_of("wear", voc).count("clothes") == 1);
    CHECK_FALSE(validate_composition("eat", "doorknob", voc));
    CHECK_FALSE(validate_composition("not_a_verb", "cup", voc));
    CHECK_FALSE(validate_composition("take", "not_an_object", voc));
}

TEST_CASE("exhaustive scan over verbs x objects matches the predicate count") {
    const Vocabulary& voc = default_vocabulary();
    size_t hits = 0;
    for (const auto& v : voc.verbs)
        for (const auto& o : voc.objects)
            if (validate_composition(v, o, voc)) ++hits;
    CHECK(hits == voc.action_predicates.size());
}

TEST_CASE("union of compositions_of over all verbs reconstructs the predicate set") {
    const Vocabulary& voc = default_vocabulary();
    std::set<std::pair<std::string, std::string>> rebuilt;
    for (const auto& v : voc.verbs)
        for (const auto& o : compositions_of(v, voc)) rebuilt.insert({v, o});
    CHECK(rebuilt == voc.action_predicates);
}

TEST_CASE("membership equivalence holds for every pair") {
    const Vocabulary& voc = default_vocabulary();
    for (const auto& v : voc.verbs) {
        std::set<std::string> comps = compositions_of(v, voc);
        for (const auto& o : voc.objects)
            CHECK(validate_composition(v, o, voc) == (comps.count(o) == 1));
    }
}

TEST_CASE("a verb with exactly one listed pair gives a singleton set") {
    const Vocabulary& voc = default_vocabulary();
    std::set<std::string> comps = compositions_of("walk_through", voc);
    REQUIRE(comps.size() == 1);
    CHECK(*comps.begin() == "door");
}

TEST_CASE("compositions_of rejects unknown verbs") {
    CHECK_THROWS_AS(compositions_of("frobnicate", default_vocabulary()), DanglingIdError);
    CHECK_THROWS_AS(verbs_for_object("widget", default_vocabulary()), DanglingIdError);
}

TEST_CASE("loading is deterministic") {
    std::string path = std::string(STAR_DATA_DIR) + "/vocabulary.json";
    Vocabulary a = load_vocabulary_file(path);
    Vocabulary b = load_vocabulary_file(path);
    CHECK(a.verbs == b.verbs);
    CHECK(a.objects == b.objects);
    CHECK(a.action_predicates == b.action_predicates);
}

TEST_CASE("empty categories are rejected") {
    std::string doc = R"({
        "verbs": [],
        "objects": ["cup"],
        "relationships": [{"id": "on", "tag": "spatial"}],
        "action_predicates": [["take", "cup"]],
        "surface_forms": {}
    })";
    CHECK_THROWS_WITH_AS(load_vocabulary(doc), "empty category: verbs", ValidationError);
}

TEST_CASE("dangling compositions are rejected") {
    std::string doc = R"({
        "verbs": ["grasp"],
        "objects": ["cup"],
        "relationships": [{"id": "on", "tag": "spatial"}],
        "action_predicates": [["grasp", "doorknob"]],
        "surface_forms": {
            "grasp": {"lemma": "grasp", "past": "grasped"},
            "cup": {"lemma": "cup", "article": "the"},
            "on": {"lemma": "on"}
        }
    })";
    CHECK_THROWS_AS(load_vocabulary(doc), ValidationError);
}

TEST_CASE("duplicate identifiers are rejected") {
    std::string doc = R"({
        "verbs": ["take", "take"],
        "objects": ["cup"],
        "relationships": [{"id": "on", "tag": "spatial"}],
        "action_predicates": [["take", "cup"]],
        "surface_forms": {
            "take": {"lemma": "take", "past": "took"},
            "cup": {"lemma": "cup", "article": "the"},
            "on": {"lemma": "on"}
        }
    })";
    CHECK_THROWS_AS(load_vocabulary(doc), ValidationError);
}

TEST_CASE("malformed documents report a parse error") {
    CHECK_THROWS_AS(load_vocabulary("{ not json"), ParseError);
    CHECK_THROWS_AS(load_vocabulary("{}"), ParseError);
}

TEST_CASE("missing surface forms are rejected") {
    std::string doc = R"({
        "verbs": ["take"],
        "objects": ["cup"],
        "relationships": [{"id": "on", "tag": "spatial"}],
        "action_predicates": [["take", "cup"]],
        "surface_forms": {
            "take": {"lemma": "take", "past": "took"},
            "on": {"lemma": "on"}
        }
    })";
    CHECK_THROWS_AS(load_vocabulary(doc), ValidationError);
}
