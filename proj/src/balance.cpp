#include "star/balance.hpp"

#include <algorithm>
#include <cmath>

#include "star/errors.hpp"
#include "star/rng.hpp"

namespace star {

namespace {

std::string group_key(const QAItem& item, BalanceGranularity group_by) {
    if (group_by == BalanceGranularity::PerQType) return to_string(item.qtype);
    std::string key = item_template_key(item);
    return key.empty() ? to_string(item.qtype) : key;
}

// The question's key components: verb/object literals bound into the
// program, prefixed by category.
std::vector<std::string> question_components(const QAItem& item, const Vocabulary& voc) {
    std::vector<std::string> out;
    for (const auto& literal : program_literals(item.program)) {
        if (voc.is_verb(literal)) out.push_back("v:" + literal);
        else if (voc.is_object(literal)) out.push_back("o:" + literal);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::string> answer_components(const QAItem& item, const Vocabulary& voc) {
    std::vector<std::string> out;
    if (auto comp = parse_option(item.options[item.correct_index], voc)) {
        if (comp->verb) out.push_back("v:" + *comp->verb);
        if (comp->object) out.push_back("o:" + *comp->object);
    }
    return out;
}

}  // namespace

std::vector<DistributionReport> compute_distribution(const std::vector<QAItem>& corpus,
                                                     BalanceGranularity group_by) {
    if (corpus.empty()) throw ValidationError("empty corpus");

    std::map<std::string, DistributionReport> reports;
    std::map<std::string, std::set<std::string>> option_domain;
    for (const auto& item : corpus) {
        std::string key = group_key(item, group_by);
        DistributionReport& r = reports[key];
        r.group = key;
        r.histogram[item.options[item.correct_index]] += 1;
        for (const auto& opt : item.options) option_domain[key].insert(opt);
    }

    std::vector<DistributionReport> out;
    for (auto& [key, r] : reports) {
        int total = 0;
        for (const auto& [content, count] : r.histogram) total += count;
        size_t k = option_domain[key].size();
        if (k > 1 && total > 0) {
            double expected = static_cast<double>(total) / static_cast<double>(k);
            double chi2 = 0.0;
            for (const auto& content : option_domain[key]) {
                auto it = r.histogram.find(content);
                double observed = it == r.histogram.end() ? 0.0 : static_cast<double>(it->second);
                chi2 += (observed - expected) * (observed - expected) / expected;
            }
            r.uniformity = chi2 / (static_cast<double>(total) * static_cast<double>(k - 1));
        }
        out.push_back(std::move(r));
    }
    return out;
}

double max_share_deviation(const DistributionReport& report) {
    size_t k = report.histogram.size();
    if (k <= 1) return 0.0;
    int total = 0;
    for (const auto& [content, count] : report.histogram) total += count;
    double mean_share = 1.0 / static_cast<double>(k);
    double worst = 0.0;
    for (const auto& [content, count] : report.histogram) {
        double share = static_cast<double>(count) / static_cast<double>(total);
        worst = std::max(worst, std::fabs(share - mean_share) / mean_share);
    }
    return worst;
}

std::vector<QAItem> filter_compositionality(const std::vector<QAItem>& corpus, const Vocabulary& voc,
                                            int min_compositions) {
    std::vector<QAItem> out;
    for (const auto& item : corpus) {
        bool keep = true;
        auto check = [&](const std::vector<std::string>& components) {
            for (const auto& c : components) {
                if (c.rfind("v:", 0) == 0 &&
                    compositions_of(c.substr(2), voc).size() < static_cast<size_t>(min_compositions))
                    keep = false;
                if (c.rfind("o:", 0) == 0 &&
                    verbs_for_object(c.substr(2), voc).size() < static_cast<size_t>(min_compositions))
                    keep = false;
            }
        };
        check(question_components(item, voc));
        check(answer_components(item, voc));
        if (keep) out.push_back(item);
    }
    return out;
}

std::vector<QAItem> resample_balance(const std::vector<QAItem>& corpus, double tolerance, uint64_t seed,
                                     BalanceGranularity group_by) {
    if (!(tolerance > 0.0 && tolerance <= 1.0))
        throw ValidationError("infeasible tolerance: must be in (0, 1]");
    if (corpus.empty()) return {};

    // Per group, iteratively drop one random item of the most
    // over-represented answer until every share is inside the band.
    std::set<std::string> dropped;  // item ids
    std::map<std::string, std::vector<const QAItem*>> groups;
    for (const auto& item : corpus) groups[group_key(item, group_by)].push_back(&item);

    for (auto& [key, members] : groups) {
        Rng rng(derive_seed(seed, "resample." + key));
        std::map<std::string, std::vector<const QAItem*>> by_answer;
        for (const QAItem* item : members) by_answer[item->options[item->correct_index]].push_back(item);

        while (true) {
            size_t k = by_answer.size();
            int total = 0;
            for (const auto& [content, items] : by_answer) total += static_cast<int>(items.size());
            if (k <= 1 || total == 0) break;
            double mean_share = 1.0 / static_cast<double>(k);

            double worst_dev = 0.0;
            size_t max_count = 0;
            std::string max_content;
            for (const auto& [content, items] : by_answer) {
                double share = static_cast<double>(items.size()) / static_cast<double>(total);
                worst_dev = std::max(worst_dev, std::fabs(share - mean_share) / mean_share);
                if (items.size() > max_count) {
                    max_count = items.size();
                    max_content = content;
                }
            }
            if (worst_dev <= tolerance) break;

            // Dropping from the largest class always moves the shares toward
            // the mean and converges on equal counts, so the loop terminates.
            auto& pool = by_answer[max_content];
            size_t victim = static_cast<size_t>(rng.below(pool.size()));
            dropped.insert(pool[victim]->id);
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(victim));
        }
    }

    std::vector<QAItem> out;
    for (const auto& item : corpus)
        if (!dropped.count(item.id)) out.push_back(item);
    return out;
}

std::map<std::pair<std::string, std::string>, int> cooccurrence_flows(const std::vector<QAItem>& corpus,
                                                                      const Vocabulary& voc) {
    std::map<std::pair<std::string, std::string>, int> flows;
    for (const auto& item : corpus) {
        std::vector<std::string> q = question_components(item, voc);
        std::vector<std::string> a = answer_components(item, voc);
        for (const auto& qc : q)
            for (const auto& ac : a) flows[{qc, ac}] += 1;
    }
    return flows;
}

double max_flow_share(const std::map<std::pair<std::string, std::string>, int>& flows) {
    long total = 0;
    int best = 0;
    for (const auto& [pair, count] : flows) {
        total += count;
        best = std::max(best, count);
    }
    if (total == 0) return 0.0;
    return static_cast<double>(best) / static_cast<double>(total);
}

}  // namespace star
