#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "star/executor.hpp"
#include "star/hypergraph.hpp"
#include "star/program.hpp"
#include "star/surface.hpp"
#include "star/vocabulary.hpp"

namespace star {

enum class SituationPolicy { Full, MaskPrediction, MaskFeasibility };

std::string to_string(SituationPolicy p);

struct QuestionTemplate {
    std::string id;
    QType qtype = QType::Interaction;
    std::string text_pattern;      // placeholders [P] [V] [O] [R]
    std::string program_skeleton;  // placeholder literals V O R
    ValueType answer_type = ValueType::ActionSet;
    SituationPolicy policy = SituationPolicy::Full;
    // Extra well-posedness requirements checked during binding extraction:
    //   unique_predicate_action, unique_object_action, single_action
    std::vector<std::string> constraints;
};

std::vector<QuestionTemplate> load_templates(const std::string& json_text);
std::vector<QuestionTemplate> load_templates_file(const std::string& path);

// Placeholder values for one question instance. Keys: P, V, O, R.
using Binding = std::map<std::string, std::string>;

struct QAItem {
    std::string id;
    std::string situation_id;  // source situation (split unit)
    QType qtype = QType::Interaction;
    std::string question;
    std::array<std::string, 4> options;
    int correct_index = 0;
    FunctionalProgram program;
    std::array<std::string, 4> provenance;  // answer | compositional | random | frequent
    std::string split;                      // empty until split_dataset runs
};

// The template id segment of an item id ("<situation>.<template>.<n>").
std::string item_template_key(const QAItem& item);

// Answer-frequency table per question type, keyed by rendered option text.
using AnswerStats = std::map<QType, std::map<std::string, int>>;

AnswerStats answer_stats(const std::vector<QAItem>& items);

// Every binding that instantiates the template into a question answerable
// on the (ground-truth counterpart of the) policy-masked graph: the program
// executes without the unanswerable signal on the ground truth, yields a
// singleton answer, satisfies the template's constraints, and — for masked
// policies — becomes unanswerable once the mask is applied.
std::vector<Binding> extract_bindings(const SituationHypergraph& gt, const QuestionTemplate& t,
                                      const Vocabulary& voc);

struct Instantiated {
    std::string raw_text;  // marker form, before language expansion
    FunctionalProgram program;
};

// Substitutes the binding into the text pattern and program skeleton.
// Throws GenerationError when the binding misses a placeholder.
Instantiated instantiate(const QuestionTemplate& t, const Binding& b);

// Executes the program on the ground truth and renders the (singleton)
// result to an option string. Unanswerable propagates to the caller.
std::string generate_answer(const FunctionalProgram& p, const SituationHypergraph& gt, QType qtype,
                            const Vocabulary& voc);

// The action instance that carries the answer (the mask target for
// feasibility items). Empty when it cannot be pinned down.
std::optional<std::string> answer_witness_action(const FunctionalProgram& p,
                                                 const SituationHypergraph& gt, const Vocabulary& voc);

// The query action a prediction item is masked on: the anchor of the
// outermost temporal operation when the question has one (the person is
// seen starting it), otherwise the answer's witness action (the future
// action itself). The answer always lies beyond the cutoff either way.
std::optional<std::string> prediction_mask_target(const FunctionalProgram& p,
                                                  const SituationHypergraph& gt, const Vocabulary& voc);

// Boolean program that checks an option's components against the question:
// the program's root is wrapped in the Verify form matching its value type.
FunctionalProgram verify_form(const FunctionalProgram& p, const OptionComponents& components);

// A wrong option recombined from verbs/objects that occur in this
// situation, valid under the vocabulary and falsified by the question's
// program. Throws GenerationError("no candidate ...") when the situation
// is too poor to supply one.
std::string gen_compositional_distractor(const SituationHypergraph& gt, const FunctionalProgram& p,
                                         const std::string& answer, ValueType answer_type, QType qtype,
                                         const std::optional<std::string>& context_verb,
                                         const Vocabulary& voc, uint64_t seed);

// A composition sampled from a different situation's facts. Deterministic
// given the seed; throws GenerationError when the corpus cannot supply a
// distinct option.
std::string gen_random_distractor(const std::vector<SituationHypergraph>& corpus,
                                  const std::string& own_situation_id, const std::string& answer,
                                  const std::set<std::string>& exclude, ValueType answer_type, QType qtype,
                                  const std::optional<std::string>& context_verb, const Vocabulary& voc,
                                  uint64_t seed);

// The most frequent answer of the question-type group, excluding the
// correct answer. Ties break lexicographically. Throws GenerationError
// on an empty stats group.
std::string gen_frequent_distractor(const AnswerStats& stats, QType qtype, const std::string& answer);

// Orders the four options with a seeded permutation and records option
// provenance. Throws GenerationError when options are not pairwise
// distinct.
QAItem assemble_qa(const std::string& id, const std::string& situation_id, QType qtype,
                   const std::string& question, const FunctionalProgram& program,
                   const std::string& answer, const std::array<std::pair<std::string, std::string>, 3>& distractors,
                   uint64_t seed);

struct GenConfig {
    int bindings_per_template = 2;
    int workers = 1;
    std::optional<double> balance_tolerance;  // enables the debias stage
    int min_compositions = 2;
};

struct GenResult {
    std::vector<QAItem> items;      // final corpus (post-debias when enabled)
    std::vector<QAItem> raw_items;  // pre-debias corpus
    std::map<std::string, SituationHypergraph> visible;  // shipped graph per item id
    std::map<std::string, SituationHypergraph> gt;       // unmasked counterpart per item id
    std::map<std::string, std::string> mask_target;      // item id -> masked action id
};

// The full two-pass pipeline: per-situation binding extraction, question
// instantiation and per-item distractors (pass 1, parallel over
// situations), then corpus-level frequent distractors and option assembly
// (pass 2, ordered reduce). Byte-identical output for a fixed seed,
// independent of cfg.workers.
GenResult generate_corpus(const std::vector<SituationHypergraph>& situations,
                          const std::vector<QuestionTemplate>& templates, const Vocabulary& voc,
                          const PropagationRules& rules, const GenConfig& cfg, uint64_t seed);

std::string serialize_qa(const std::vector<QAItem>& items);
std::vector<QAItem> parse_qa(const std::string& json_text);
std::vector<QAItem> load_qa_file(const std::string& path);

}  // namespace star
