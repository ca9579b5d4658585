#pragma once

#include <map>
#include <string>
#include <vector>

#include "star/qagen.hpp"
#include "star/vocabulary.hpp"

namespace star {

enum class BalanceGranularity { PerQType, PerTemplate };

// Answer-distribution measurements for one group (question type or
// template). `uniformity` is the chi-square statistic against the uniform
// distribution over the group's option contents, normalized to [0, 1]
// (0 = uniform answers, 1 = a single answer takes the whole group).
struct DistributionReport {
    std::string group;
    std::map<std::string, int> histogram;  // answer content -> count
    double uniformity = 0.0;
    std::map<std::pair<std::string, std::string>, int> flow_table;
};

// Exact answer counts per group. Throws ValidationError on an empty corpus.
std::vector<DistributionReport> compute_distribution(const std::vector<QAItem>& corpus,
                                                     BalanceGranularity group_by);

// Largest relative deviation of any answer share from the group's mean
// share (1/k over k distinct answers). 0 for k <= 1.
double max_share_deviation(const DistributionReport& report);

// Drops items whose question/answer verbs have fewer than min_compositions
// legal objects, and symmetrically for nouns across verbs. Idempotent.
std::vector<QAItem> filter_compositionality(const std::vector<QAItem>& corpus, const Vocabulary& voc,
                                            int min_compositions);

// Seeded down-sampling of over-represented answers until every answer
// share in every group deviates from the group mean share by at most
// `tolerance` (relative). Returns a subset of the corpus in its original
// order; items are untouched.
std::vector<QAItem> resample_balance(const std::vector<QAItem>& corpus, double tolerance, uint64_t seed,
                                     BalanceGranularity group_by = BalanceGranularity::PerQType);

// Co-occurrence counts between question key components and answer key
// components ("v:<verb>" / "o:<object>" keys). Empty corpus gives an
// empty table.
std::map<std::pair<std::string, std::string>, int> cooccurrence_flows(const std::vector<QAItem>& corpus,
                                                                      const Vocabulary& voc);

// Share of the single largest flow in the table; 0 for an empty table.
double max_flow_share(const std::map<std::pair<std::string, std::string>, int>& flows);

}  // namespace star
