#include "star/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "star/errors.hpp"
#include "star/executor.hpp"
#include "star/rng.hpp"
#include "star/surface.hpp"

namespace star {

using nlohmann::json;

double EvalReport::accuracy(QType q) const {
    auto t = total.find(q);
    if (t == total.end() || t->second == 0) return 0.0;
    auto c = correct.find(q);
    return static_cast<double>(c == correct.end() ? 0 : c->second) / static_cast<double>(t->second);
}

double EvalReport::overall_accuracy() const {
    if (overall_total == 0) return 0.0;
    return static_cast<double>(overall_correct) / static_cast<double>(overall_total);
}

std::string format_report(const EvalReport& report) {
    std::ostringstream out;
    out << "Interaction  Sequence  Prediction  Feasibility  Overall\n";
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%10.2f  %8.2f  %10.2f  %11.2f  %7.2f\n",
                  100.0 * report.accuracy(QType::Interaction), 100.0 * report.accuracy(QType::Sequence),
                  100.0 * report.accuracy(QType::Prediction), 100.0 * report.accuracy(QType::Feasibility),
                  100.0 * report.overall_accuracy());
    out << buf;
    return out.str();
}

std::string report_to_json(const EvalReport& report) {
    json j;
    for (QType q : {QType::Interaction, QType::Sequence, QType::Prediction, QType::Feasibility}) {
        json jq;
        auto tot = report.total.find(q);
        auto cor = report.correct.find(q);
        jq["total"] = tot == report.total.end() ? 0 : tot->second;
        jq["correct"] = cor == report.correct.end() ? 0 : cor->second;
        jq["accuracy"] = report.accuracy(q);
        j["per_qtype"][to_string(q)] = jq;
    }
    j["overall"] = {{"total", report.overall_total},
                    {"correct", report.overall_correct},
                    {"accuracy", report.overall_accuracy()}};
    if (!report.config_echo.empty()) j["config"] = report.config_echo;
    return j.dump(2) + "\n";
}

std::vector<QAItem> SplitResult::labeled() const {
    std::vector<QAItem> out;
    out.reserve(train.size() + val.size() + test.size());
    for (const auto* part : {&train, &val, &test})
        for (const auto& item : *part) out.push_back(item);
    std::sort(out.begin(), out.end(), [](const QAItem& a, const QAItem& b) { return a.id < b.id; });
    return out;
}

std::array<double, 3> parse_ratios(const std::string& text) {
    std::array<double, 3> ratios{};
    std::istringstream in(text);
    std::string part;
    for (int i = 0; i < 3; ++i) {
        if (!std::getline(in, part, ':')) throw ParseError("ratios must look like '6:1:1'");
        try {
            ratios[static_cast<size_t>(i)] = std::stod(part);
        } catch (const std::exception&) {
            throw ParseError("ratios must look like '6:1:1'");
        }
        if (ratios[static_cast<size_t>(i)] <= 0) throw ValidationError("ratios must be positive");
    }
    if (std::getline(in, part, ':')) throw ParseError("ratios must have exactly three parts");
    return ratios;
}

SplitResult split_dataset(const std::vector<QAItem>& corpus, std::array<double, 3> ratios,
                          uint64_t seed) {
    std::set<std::string> situation_set;
    for (const auto& item : corpus) situation_set.insert(item.situation_id);
    if (situation_set.size() < 3) throw ValidationError("corpus smaller than 3 situations");

    std::vector<std::string> situations(situation_set.begin(), situation_set.end());
    Rng rng(derive_seed(seed, "split"));
    rng.shuffle(situations);

    double sum = ratios[0] + ratios[1] + ratios[2];
    size_t n = situations.size();
    std::array<size_t, 3> counts{};
    std::array<double, 3> fractional{};
    size_t assigned = 0;
    for (size_t i = 0; i < 3; ++i) {
        double exact = static_cast<double>(n) * ratios[i] / sum;
        counts[i] = static_cast<size_t>(std::floor(exact));
        fractional[i] = exact - std::floor(exact);
        assigned += counts[i];
    }
    while (assigned < n) {
        size_t best = 0;
        for (size_t i = 1; i < 3; ++i)
            if (fractional[i] > fractional[best]) best = i;
        counts[best] += 1;
        fractional[best] = -1.0;
        ++assigned;
    }

    std::map<std::string, std::string> label;
    size_t idx = 0;
    for (size_t part = 0; part < 3; ++part) {
        const char* name = part == 0 ? "train" : part == 1 ? "val" : "test";
        for (size_t i = 0; i < counts[part]; ++i) label[situations[idx++]] = name;
    }

    SplitResult result;
    for (const auto& item : corpus) {
        QAItem copy = item;
        copy.split = label.at(item.situation_id);
        if (copy.split == "train")
            result.train.push_back(copy);
        else if (copy.split == "val")
            result.val.push_back(copy);
        else
            result.test.push_back(copy);
    }
    return result;
}

int baseline_random(const QAItem& item, uint64_t seed) {
    Rng rng(derive_seed(seed, "qtype-random." + item.id));
    return static_cast<int>(rng.below(4));
}

int baseline_frequent(const AnswerStats& train_stats, const QAItem& item) {
    auto group = train_stats.find(item.qtype);
    if (group == train_stats.end()) return 0;
    int best_index = -1;
    int best_count = 0;
    std::string best_content;
    for (int i = 0; i < 4; ++i) {
        auto it = group->second.find(item.options[static_cast<size_t>(i)]);
        if (it == group->second.end()) continue;
        bool better = it->second > best_count ||
                      (it->second == best_count && best_index >= 0 && it->first < best_content);
        if (best_index < 0 || better) {
            best_index = i;
            best_count = it->second;
            best_content = it->first;
        }
    }
    return best_index < 0 ? 0 : best_index;
}

SituationHypergraph degrade(const SituationHypergraph& graph, const NoiseSpec& spec) {
    Rng rng(derive_seed(spec.seed, "degrade." + graph.id));

    std::set<std::string> dropped_nodes;
    for (const auto& e : graph.entities)
        if (e.kind == NodeKind::Object && rng.unit() < spec.p_drop_object) dropped_nodes.insert(e.id);

    SituationHypergraph out;
    out.id = graph.id;
    out.source_interval = graph.source_interval;
    for (const auto& e : graph.entities)
        if (!dropped_nodes.count(e.id)) out.entities.push_back(e);

    for (const auto& f : graph.frames) {
        FrameSubgraph nf;
        nf.frame = f.frame;
        for (const auto& n : f.nodes)
            if (!dropped_nodes.count(n)) nf.nodes.insert(n);
        for (const auto& t : f.triplets) {
            bool dropped = rng.unit() < spec.p_drop_relation;
            if (dropped || dropped_nodes.count(t.subject) || dropped_nodes.count(t.object)) continue;
            nf.triplets.insert(t);
        }
        out.frames.push_back(std::move(nf));
    }

    // A hyperedge whose object entity disappeared is a dangling reference;
    // it goes with the node.
    std::set<std::string> remaining_classes;
    for (const auto& e : out.entities) remaining_classes.insert(e.cls);
    for (const auto& a : graph.actions) {
        if (rng.unit() < spec.p_drop_action) continue;
        if (!remaining_classes.count(a.object)) continue;
        out.actions.push_back(a);
    }
    return out;
}

int executor_answer(const QAItem& item, const SituationHypergraph& graph, const Vocabulary& voc,
                    uint64_t fallback_seed) {
    try {
        ExecValue value = execute(item.program, graph, voc);
        std::string rendered = render_option(value, graph, item.qtype, voc);
        for (int i = 0; i < 4; ++i)
            if (item.options[static_cast<size_t>(i)] == rendered) return i;
    } catch (const Unanswerable&) {
    } catch (const DanglingIdError&) {
    }
    return baseline_random(item, fallback_seed);
}

EvalReport evaluate(const std::map<std::string, int>& predictions, const std::vector<QAItem>& corpus) {
    EvalReport report;
    for (const auto& item : corpus) {
        auto it = predictions.find(item.id);
        if (it == predictions.end())
            throw ValidationError("missing prediction for item '" + item.id + "'");
        report.total[item.qtype] += 1;
        report.overall_total += 1;
        if (it->second == item.correct_index) {
            report.correct[item.qtype] += 1;
            report.overall_correct += 1;
        }
    }
    return report;
}

std::vector<DegradePoint> degrade_sweep(const std::vector<QAItem>& corpus,
                                        const std::map<std::string, SituationHypergraph>& gt,
                                        const Vocabulary& voc, const std::vector<double>& ps,
                                        int n_seeds, uint64_t seed) {
    std::vector<DegradePoint> out;
    for (double p : ps) {
        double acc_sum = 0.0;
        for (int s = 0; s < n_seeds; ++s) {
            std::map<std::string, int> predictions;
            NoiseSpec spec;
            spec.p_drop_object = spec.p_drop_relation = spec.p_drop_action = p;
            spec.seed = derive_seed(seed, "noise." + std::to_string(s) + "." + std::to_string(p));
            for (const auto& item : corpus) {
                auto g = gt.find(item.id);
                if (g == gt.end())
                    throw ValidationError("no ground-truth graph for item '" + item.id + "'");
                SituationHypergraph noisy = degrade(g->second, spec);
                predictions[item.id] =
                    executor_answer(item, noisy, voc, derive_seed(spec.seed, "fallback"));
            }
            acc_sum += evaluate(predictions, corpus).overall_accuracy();
        }
        out.push_back({p, acc_sum / static_cast<double>(n_seeds)});
    }
    return out;
}

}  // namespace star
