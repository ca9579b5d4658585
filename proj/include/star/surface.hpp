#pragma once

#include <optional>
#include <string>

#include "star/executor.hpp"
#include "star/vocabulary.hpp"

namespace star {

enum class QType { Interaction, Sequence, Prediction, Feasibility };

std::string to_string(QType q);
QType qtype_from_string(const std::string& s);

// Question texts and options are produced in two steps: template filling
// emits a raw string with morphology markers, language expansion resolves
// the markers into English. Markers:
//   {person}      -> "the person"
//   {v_past:ID}   -> past form of the verb
//   {v_pres:ID}   -> present (lemma) form
//   {v_inf:ID}    -> infinitive (lemma) form
//   {obj:ID}      -> article + object lemma
//   {rel:ID}      -> relationship lemma
// Expansion is idempotent: a string without markers comes back unchanged.
std::string expand_language(const std::string& raw, const Vocabulary& voc);

// True when the text still contains template placeholder tokens.
bool has_placeholder_tokens(const std::string& text);

// Renders an executor value to a raw option string (marker form). Action
// phrases use past tense for interaction/sequence and the infinitive for
// prediction/feasibility. The graph supplies each action's predicate.
std::string render_value_raw(const ExecValue& value, const SituationHypergraph& graph, QType qtype);

// render_value_raw followed by expand_language.
std::string render_option(const ExecValue& value, const SituationHypergraph& graph, QType qtype,
                          const Vocabulary& voc);

// Renders a single (verb, object) composition the same way an executed
// action answer would render.
std::string render_action_phrase(const std::string& verb, const std::string& object, QType qtype,
                                 const Vocabulary& voc);
std::string render_object_phrase(const std::string& object, const Vocabulary& voc);

// Symbolic content of an option string, recovered via the vocabulary's
// surface forms (the closed world makes rendering invertible).
struct OptionComponents {
    std::optional<std::string> verb;
    std::optional<std::string> object;

    bool operator==(const OptionComponents&) const = default;
};

std::optional<OptionComponents> parse_option(const std::string& option, const Vocabulary& voc);

}  // namespace star
