#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "star/hypergraph.hpp"
#include "star/qagen.hpp"

namespace star {

struct EvalReport {
    std::map<QType, int> correct;
    std::map<QType, int> total;
    int overall_correct = 0;
    int overall_total = 0;
    std::string config_echo;

    double accuracy(QType q) const;
    double overall_accuracy() const;
};

// Renders the report as the four-column accuracy table.
std::string format_report(const EvalReport& report);
std::string report_to_json(const EvalReport& report);

struct NoiseSpec {
    double p_drop_object = 0.0;
    double p_drop_relation = 0.0;
    double p_drop_action = 0.0;
    uint64_t seed = 0;
};

struct SplitResult {
    std::vector<QAItem> train, val, test;

    // The input corpus with split labels attached, original order.
    std::vector<QAItem> labeled() const;
};

// Partitions by situation id (a situation's items never straddle splits)
// with sizes matching the ratios up to one situation. Deterministic given
// the seed. Throws ValidationError for corpora under 3 situations.
SplitResult split_dataset(const std::vector<QAItem>& corpus, std::array<double, 3> ratios, uint64_t seed);

std::array<double, 3> parse_ratios(const std::string& text);  // "6:1:1"

// Uniform seeded choice among the four options.
int baseline_random(const QAItem& item, uint64_t seed);

// Picks the option whose content is the most frequent training-split
// answer for the item's question type (lexicographic tie-break); option 0
// when no option appears in the stats.
int baseline_frequent(const AnswerStats& train_stats, const QAItem& item);

// Independently drops object nodes, relation triplets and action
// hyperedges with the given probabilities, then cleans dangling
// references so the result validates. Identity at p = 0.
SituationHypergraph degrade(const SituationHypergraph& graph, const NoiseSpec& spec);

// Executes the item's program on the graph and matches the rendered result
// against the options. Falls back to a seeded random choice when execution
// signals unanswerable or nothing matches (forced-answer protocol).
int executor_answer(const QAItem& item, const SituationHypergraph& graph, const Vocabulary& voc,
                    uint64_t fallback_seed);

// Exact per-type and overall accuracies. Throws ValidationError when a
// prediction is missing.
EvalReport evaluate(const std::map<std::string, int>& predictions, const std::vector<QAItem>& corpus);

struct DegradePoint {
    double p = 0.0;
    double accuracy = 0.0;
};

// Executor accuracy on ground-truth graphs degraded at each probability
// (applied uniformly to objects, relations and actions), averaged over
// n_seeds independent noise draws.
std::vector<DegradePoint> degrade_sweep(const std::vector<QAItem>& corpus,
                                        const std::map<std::string, SituationHypergraph>& gt,
                                        const Vocabulary& voc, const std::vector<double>& ps,
                                        int n_seeds, uint64_t seed);

}  // namespace star
