#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "star/balance.hpp"
#include "star/errors.hpp"
#include "star/executor.hpp"
#include "star/harness.hpp"
#include "star/oracle.hpp"
#include "star/qagen.hpp"
#include "star/rng.hpp"
#include "star/synth.hpp"

namespace {

using nlohmann::json;
using namespace star;

struct Options {
    std::string config_path;
    uint64_t seed = 7;
    std::string vocab = "data/vocabulary.json";
    std::string templates = "data/templates.json";
    std::string rules;  // optional propagation rules file
    std::string in;
    std::string out;
    std::string out_visible;
    std::string out_gt;
    std::string visible;
    std::string gt;
    double tolerance = 0.0;  // 0 disables the debias stage
    std::string ratios = "6:1:1";
    double noise_obj = 0.0, noise_rel = 0.0, noise_act = 0.0;
    int workers = 1;
    int situations = 800;
    int min_actions = 1;
    int max_actions = 6;
    int bindings = 2;
    int min_compositions = 2;
    std::string baseline = "random";
    std::string p_grid = "0,0.1,0.2,0.3";
    int noise_seeds = 20;
    std::string group_by = "qtype";
    std::string predictions_in;
    std::string predictions_out;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << content;
    if (!out) throw Error("write failed for '" + path + "'");
}

// Flags win over the config file, which wins over defaults. CLI11 reports
// whether a flag was actually passed, so config values only fill the gaps.
void apply_config(const CLI::App& cmd, Options& opt) {
    uint64_t env_seed = 0;
    bool has_env_seed = false;
    if (const char* env = std::getenv("SITU_SEED")) {
        env_seed = std::strtoull(env, nullptr, 10);
        has_env_seed = true;
    }
    json cfg;
    if (!opt.config_path.empty()) cfg = json::parse(read_file(opt.config_path));

    auto take = [&](const char* flag, const char* key, auto& slot) {
        const CLI::Option* o = cmd.get_option_no_throw(flag);
        bool flag_given = o && o->count() > 0;
        if (flag_given) return;
        if (!cfg.is_null() && cfg.contains(key)) {
            cfg.at(key).get_to(slot);
            return;
        }
        if constexpr (std::is_integral_v<std::decay_t<decltype(slot)>>) {
            if (std::string(key) == "seed" && has_env_seed)
                slot = static_cast<std::decay_t<decltype(slot)>>(env_seed);
        }
    };

    take("--seed", "seed", opt.seed);
    take("--vocab", "vocab", opt.vocab);
    take("--templates", "templates", opt.templates);
    take("--rules", "rules", opt.rules);
    take("--in", "in", opt.in);
    take("--out", "out", opt.out);
    take("--out-visible", "out_visible", opt.out_visible);
    take("--out-gt", "out_gt", opt.out_gt);
    take("--visible", "visible", opt.visible);
    take("--gt", "gt", opt.gt);
    take("--tolerance", "tolerance", opt.tolerance);
    take("--ratios", "ratios", opt.ratios);
    take("--noise-obj", "noise_obj", opt.noise_obj);
    take("--noise-rel", "noise_rel", opt.noise_rel);
    take("--noise-act", "noise_act", opt.noise_act);
    take("--workers", "workers", opt.workers);
    take("--situations", "situations", opt.situations);
    take("--min-actions", "min_actions", opt.min_actions);
    take("--max-actions", "max_actions", opt.max_actions);
    take("--bindings", "bindings_per_template", opt.bindings);
    take("--min-compositions", "min_compositions", opt.min_compositions);
    take("--baseline", "baseline", opt.baseline);
    take("--p-grid", "p_grid", opt.p_grid);
    take("--noise-seeds", "noise_seeds", opt.noise_seeds);
    take("--by", "group_by", opt.group_by);
}

void add_common(CLI::App* cmd, Options& opt) {
    cmd->add_option("--config", opt.config_path, "JSON config file; flags override it");
    cmd->add_option("--seed", opt.seed, "root seed (env SITU_SEED as fallback)");
    cmd->add_option("--vocab", opt.vocab, "vocabulary file");
    cmd->add_option("--templates", opt.templates, "question template file");
    cmd->add_option("--rules", opt.rules, "relation propagation rules file");
    cmd->add_option("--in", opt.in, "input file");
    cmd->add_option("--out", opt.out, "output file");
    cmd->add_option("--workers", opt.workers, "worker threads (output is identical for any count)");
}

std::string with_suffix(const std::string& path, const std::string& tag) {
    size_t dot = path.rfind('.');
    if (dot == std::string::npos) return path + "." + tag;
    return path.substr(0, dot) + "." + tag + path.substr(dot);
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) out.push_back(std::stod(part));
    if (out.empty()) throw ParseError("empty probability grid");
    return out;
}

PropagationRules rules_for(const Options& opt) {
    if (opt.rules.empty()) return default_propagation_rules();
    return load_propagation_rules(read_file(opt.rules));
}

std::map<std::string, SituationHypergraph> graphs_by_id(const std::vector<SituationHypergraph>& v) {
    std::map<std::string, SituationHypergraph> out;
    for (const auto& g : v) out.emplace(g.id, g);
    return out;
}

int cmd_synth(Options& opt) {
    Vocabulary voc = load_vocabulary(read_file(opt.vocab));
    SynthConfig cfg;
    cfg.situations = opt.situations;
    cfg.min_actions = opt.min_actions;
    cfg.max_actions = opt.max_actions;
    cfg.seed = opt.seed;
    std::vector<SituationHypergraph> corpus = synthesize_corpus(voc, cfg);
    if (opt.out.empty()) throw Error("synth: --out is required");
    write_file(opt.out, serialize_corpus(corpus));
    std::cout << "wrote " << corpus.size() << " situations to " << opt.out << "\n";
    return 0;
}

int cmd_generate(Options& opt) {
    if (opt.in.empty()) throw Error("generate: --in situations file is required");
    if (opt.out.empty()) throw Error("generate: --out corpus file is required");
    Vocabulary voc = load_vocabulary(read_file(opt.vocab));
    std::vector<QuestionTemplate> templates = load_templates(read_file(opt.templates));
    std::vector<SituationHypergraph> situations = parse_corpus(read_file(opt.in));

    GenConfig cfg;
    cfg.bindings_per_template = opt.bindings;
    cfg.workers = opt.workers;
    cfg.min_compositions = opt.min_compositions;
    if (opt.tolerance > 0.0) cfg.balance_tolerance = opt.tolerance;

    GenResult result = generate_corpus(situations, templates, voc, rules_for(opt), cfg, opt.seed);

    write_file(opt.out, serialize_qa(result.items));
    if (cfg.balance_tolerance) write_file(with_suffix(opt.out, "raw"), serialize_qa(result.raw_items));
    std::string visible_path = opt.out_visible.empty() ? with_suffix(opt.out, "visible") : opt.out_visible;
    std::string gt_path = opt.out_gt.empty() ? with_suffix(opt.out, "gt") : opt.out_gt;

    std::vector<SituationHypergraph> visible, gt;
    for (const auto& item : result.raw_items) {
        visible.push_back(result.visible.at(item.id));
        gt.push_back(result.gt.at(item.id));
    }
    write_file(visible_path, serialize_corpus(visible));
    write_file(gt_path, serialize_corpus(gt));

    std::map<std::string, int> counts;
    for (const auto& item : result.items) counts[to_string(item.qtype)] += 1;
    std::cout << "generated " << result.raw_items.size() << " items";
    if (cfg.balance_tolerance) std::cout << " (" << result.items.size() << " after debias)";
    std::cout << "\n";
    for (const auto& [qtype, n] : counts) std::cout << "  " << qtype << ": " << n << "\n";
    return 0;
}

int cmd_validate(Options& opt) {
    if (opt.in.empty()) throw Error("validate: --in corpus file is required");
    if (opt.visible.empty() || opt.gt.empty())
        throw Error("validate: --visible and --gt graph files are required");
    Vocabulary voc = load_vocabulary(read_file(opt.vocab));
    std::vector<QAItem> items = parse_qa(read_file(opt.in));
    auto visible = graphs_by_id(parse_corpus(read_file(opt.visible)));
    auto gt = graphs_by_id(parse_corpus(read_file(opt.gt)));

    int problems = 0;
    auto report = [&problems](const std::string& item, const std::string& what) {
        std::cout << "violation: item=" << item << " " << what << "\n";
        ++problems;
    };

    for (const auto& item : items) {
        auto gv = visible.find(item.id);
        auto gg = gt.find(item.id);
        if (gv == visible.end() || gg == gt.end()) {
            report(item.id, "missing shipped or ground-truth graph");
            continue;
        }
        for (const auto& v : validate_graph(gv->second, voc)) report(item.id, "visible graph: " + v.message);
        for (const auto& v : validate_graph(gg->second, voc)) report(item.id, "gt graph: " + v.message);

        TypecheckResult tc = typecheck(item.program);
        if (!tc.ok) {
            report(item.id, "program does not typecheck: " + tc.error);
            continue;
        }
        try {
            int oracle = brute_force_oracle(item, gg->second, voc);
            if (oracle != item.correct_index)
                report(item.id, "oracle disagrees with correct_index");
        } catch (const Error& e) {
            report(item.id, std::string("oracle: ") + e.what());
        }
        if (has_placeholder_tokens(item.question)) report(item.id, "question has placeholder tokens");

        if (item.qtype == QType::Prediction || item.qtype == QType::Feasibility) {
            try {
                execute(item.program, gv->second, voc);
                report(item.id, "answer is recoverable from the masked graph");
            } catch (const Unanswerable&) {
            } catch (const Error& e) {
                report(item.id, std::string("masked execution: ") + e.what());
            }
        }
        if (item.qtype == QType::Prediction) {
            auto target = prediction_mask_target(item.program, gg->second, voc);
            if (!target) {
                report(item.id, "no query action for the prediction mask");
            } else {
                int cutoff = prediction_cutoff(*gg->second.find_action(*target));
                for (const auto& f : gv->second.frames)
                    if (f.frame > cutoff) report(item.id, "visible frame beyond the prediction cutoff");
            }
        }
    }
    std::cout << (problems == 0 ? "clean" : std::to_string(problems) + " violation(s)") << "\n";
    return problems == 0 ? 0 : 1;
}

int cmd_stats(Options& opt) {
    if (opt.in.empty()) throw Error("stats: --in corpus file is required");
    Vocabulary voc = load_vocabulary(read_file(opt.vocab));
    std::vector<QAItem> items = parse_qa(read_file(opt.in));
    BalanceGranularity by =
        opt.group_by == "template" ? BalanceGranularity::PerTemplate : BalanceGranularity::PerQType;

    json out;
    for (const auto& r : compute_distribution(items, by)) {
        json jg;
        jg["group"] = r.group;
        jg["histogram"] = r.histogram;
        jg["uniformity"] = r.uniformity;
        jg["max_share_deviation"] = max_share_deviation(r);
        out["groups"].push_back(jg);
    }
    auto flows = cooccurrence_flows(items, voc);
    json jf = json::array();
    for (const auto& [pair, count] : flows) jf.push_back({pair.first, pair.second, count});
    out["flows"] = jf;
    out["max_flow_share"] = max_flow_share(flows);

    std::string text = out.dump(2) + "\n";
    if (!opt.out.empty()) {
        write_file(opt.out, text);
        // Companion (source, target, count) table for Sankey-style plotting.
        std::string tsv_path = opt.out.substr(0, opt.out.rfind('.')) + ".flows.tsv";
        std::ostringstream tsv;
        tsv << "source\ttarget\tcount\n";
        for (const auto& [pair, count] : flows)
            tsv << pair.first << "\t" << pair.second << "\t" << count << "\n";
        write_file(tsv_path, tsv.str());
    } else {
        std::cout << text;
    }
    return 0;
}

int cmd_split(Options& opt) {
    if (opt.in.empty()) throw Error("split: --in corpus file is required");
    if (opt.out.empty()) throw Error("split: --out corpus file is required");
    std::vector<QAItem> items = parse_qa(read_file(opt.in));
    SplitResult split = split_dataset(items, parse_ratios(opt.ratios), opt.seed);
    write_file(opt.out, serialize_qa(split.labeled()));

    std::set<std::string> train_s, val_s, test_s;
    for (const auto& i : split.train) train_s.insert(i.situation_id);
    for (const auto& i : split.val) val_s.insert(i.situation_id);
    for (const auto& i : split.test) test_s.insert(i.situation_id);
    std::cout << "train: " << split.train.size() << " items / " << train_s.size() << " situations\n"
              << "val:   " << split.val.size() << " items / " << val_s.size() << " situations\n"
              << "test:  " << split.test.size() << " items / " << test_s.size() << " situations\n";
    return 0;
}

int cmd_eval(Options& opt) {
    if (opt.in.empty()) throw Error("eval: --in corpus file is required");
    std::vector<QAItem> all = parse_qa(read_file(opt.in));

    std::vector<QAItem> train, target;
    for (const auto& item : all) {
        if (item.split == "train") train.push_back(item);
        if (item.split == "test" || item.split.empty()) target.push_back(item);
    }
    if (target.empty()) throw Error("eval: no test items in the corpus");

    std::map<std::string, int> predictions;
    if (!opt.predictions_in.empty()) {
        json arr = json::parse(read_file(opt.predictions_in));
        for (const auto& p : arr) predictions[p.at("id").get<std::string>()] = p.at("choice").get<int>();
    } else if (opt.baseline == "random") {
        for (const auto& item : target) predictions[item.id] = baseline_random(item, opt.seed);
    } else if (opt.baseline == "frequent") {
        if (train.empty()) throw Error("eval: the frequent baseline needs a train split (run split first)");
        AnswerStats stats = answer_stats(train);
        for (const auto& item : target) predictions[item.id] = baseline_frequent(stats, item);
    } else {
        throw Error("eval: unknown baseline '" + opt.baseline + "'");
    }

    if (!opt.predictions_out.empty()) {
        json arr = json::array();
        for (const auto& [id, choice] : predictions) arr.push_back({{"id", id}, {"choice", choice}});
        write_file(opt.predictions_out, arr.dump(2) + "\n");
    }

    EvalReport report = evaluate(predictions, target);
    report.config_echo = "baseline=" + (opt.predictions_in.empty() ? opt.baseline : "file") +
                         " seed=" + std::to_string(opt.seed);
    std::cout << format_report(report);
    if (!opt.out.empty()) write_file(opt.out, report_to_json(report));
    return 0;
}

int cmd_degrade_eval(Options& opt) {
    if (opt.in.empty()) throw Error("degrade-eval: --in corpus file is required");
    if (opt.gt.empty()) throw Error("degrade-eval: --gt graph file is required");
    Vocabulary voc = load_vocabulary(read_file(opt.vocab));
    std::vector<QAItem> items = parse_qa(read_file(opt.in));
    auto gt = graphs_by_id(parse_corpus(read_file(opt.gt)));

    // Explicit per-category noise runs once at that spec; otherwise sweep
    // the probability grid uniformly across all three categories.
    std::vector<DegradePoint> sweep;
    if (opt.noise_obj > 0.0 || opt.noise_rel > 0.0 || opt.noise_act > 0.0) {
        NoiseSpec spec;
        spec.p_drop_object = opt.noise_obj;
        spec.p_drop_relation = opt.noise_rel;
        spec.p_drop_action = opt.noise_act;
        double acc_sum = 0.0;
        for (int s = 0; s < opt.noise_seeds; ++s) {
            spec.seed = derive_seed(opt.seed, "noise." + std::to_string(s));
            std::map<std::string, int> predictions;
            for (const auto& item : items) {
                auto g = gt.find(item.id);
                if (g == gt.end()) throw Error("no ground-truth graph for item '" + item.id + "'");
                SituationHypergraph noisy = degrade(g->second, spec);
                predictions[item.id] = executor_answer(item, noisy, voc, derive_seed(spec.seed, "fallback"));
            }
            acc_sum += evaluate(predictions, items).overall_accuracy();
        }
        sweep.push_back({std::max({opt.noise_obj, opt.noise_rel, opt.noise_act}),
                         acc_sum / static_cast<double>(opt.noise_seeds)});
    } else {
        sweep = degrade_sweep(items, gt, voc, parse_grid(opt.p_grid), opt.noise_seeds, opt.seed);
    }

    json out = json::array();
    std::cout << "p      accuracy\n";
    for (const auto& point : sweep) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%-6.2f %.4f\n", point.p, point.accuracy);
        std::cout << buf;
        out.push_back({{"p", point.p}, {"accuracy", point.accuracy}});
    }
    if (!opt.out.empty()) write_file(opt.out, out.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"situated-reasoning corpus toolkit"};
    app.require_subcommand(1);
    Options opt;

    CLI::App* synth = app.add_subcommand("synth", "synthesize a situation corpus");
    add_common(synth, opt);
    synth->add_option("--situations", opt.situations, "number of situations");
    synth->add_option("--min-actions", opt.min_actions, "minimum actions per situation");
    synth->add_option("--max-actions", opt.max_actions, "maximum actions per situation");

    CLI::App* generate = app.add_subcommand("generate", "generate questions, answers and options");
    add_common(generate, opt);
    generate->add_option("--tolerance", opt.tolerance, "balance tolerance; enables the debias stage");
    generate->add_option("--bindings", opt.bindings, "bindings kept per situation and template");
    generate->add_option("--min-compositions", opt.min_compositions,
                         "compositionality threshold for the debias stage");
    generate->add_option("--out-visible", opt.out_visible, "shipped graphs output");
    generate->add_option("--out-gt", opt.out_gt, "ground-truth graphs output");

    CLI::App* validate = app.add_subcommand("validate", "check corpus integrity and oracle agreement");
    add_common(validate, opt);
    validate->add_option("--visible", opt.visible, "shipped graphs file");
    validate->add_option("--gt", opt.gt, "ground-truth graphs file");

    CLI::App* stats = app.add_subcommand("stats", "answer distributions and co-occurrence flows");
    add_common(stats, opt);
    stats->add_option("--by", opt.group_by, "group by 'qtype' or 'template'");

    CLI::App* split = app.add_subcommand("split", "situation-level train/val/test split");
    add_common(split, opt);
    split->add_option("--ratios", opt.ratios, "split ratios, e.g. 6:1:1");

    CLI::App* eval = app.add_subcommand("eval", "score a baseline or a predictions file");
    add_common(eval, opt);
    eval->add_option("--baseline", opt.baseline, "random | frequent");
    eval->add_option("--predictions-in", opt.predictions_in, "score an existing predictions file");
    eval->add_option("--predictions-out", opt.predictions_out, "write the predictions made");

    CLI::App* degrade = app.add_subcommand("degrade-eval", "executor accuracy under graph degradation");
    add_common(degrade, opt);
    degrade->add_option("--gt", opt.gt, "ground-truth graphs file");
    degrade->add_option("--p-grid", opt.p_grid, "comma-separated drop probabilities");
    degrade->add_option("--noise-seeds", opt.noise_seeds, "noise draws to average");
    degrade->add_option("--noise-obj", opt.noise_obj, "object drop probability (single run)");
    degrade->add_option("--noise-rel", opt.noise_rel, "relation drop probability (single run)");
    degrade->add_option("--noise-act", opt.noise_act, "action drop probability (single run)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        CLI::App* cmd = app.get_subcommands().front();
        apply_config(*cmd, opt);
        if (cmd == synth) return cmd_synth(opt);
        if (cmd == generate) return cmd_generate(opt);
        if (cmd == validate) return cmd_validate(opt);
        if (cmd == stats) return cmd_stats(opt);
        if (cmd == split) return cmd_split(opt);
        if (cmd == eval) return cmd_eval(opt);
        if (cmd == degrade) return cmd_degrade_eval(opt);
        throw Error("unknown subcommand");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
