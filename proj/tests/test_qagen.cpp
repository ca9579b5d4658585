#include <map>

#include "doctest.h"
#include "helpers.hpp"
#include "star/errors.hpp"
#include "star/executor.hpp"
#include "star/qagen.hpp"
#include "star/rng.hpp"

using namespace star;
using star::testing::chain3;
using star::testing::default_templates;
using star::testing::default_vocabulary;
using star::testing::make_graph;

namespace {

const QuestionTemplate& template_by_id(const std::string& id) {
    for (const auto& t : default_templates())
        if (t.id == id) return t;
    throw std::runtime_error("no template " + id);
}

GenResult small_corpus(uint64_t seed = 7, int situations = 12, std::optional<double> tolerance = {}) {
    GenConfig cfg;
    cfg.bindings_per_template = 2;
    cfg.balance_tolerance = tolerance;
    return generate_corpus(star::testing::random_graphs(situations, 99), default_templates(),
                           default_vocabulary(), default_propagation_rules(), cfg, seed);
}

}  // namespace

TEST_CASE("the shipped template library covers all four question types") {
    std::map<QType, int> counts;
    for (const auto& t : default_templates()) counts[t.qtype] += 1;
    CHECK(counts.size() == 4);
    for (const auto& [q, n] : counts) CHECK(n >= 3);
}

TEST_CASE("template invariants are enforced at load time") {
    std::string bad = R"js([{
        "id": "x", "qtype": "prediction",
        "text_pattern": "What will [P] do with the [O]?",
        "program_skeleton": "Query_Earliest(Filter_Actions_by_Object(AllActions, O))",
        "answer_type": "action_set",
        "situation_policy": "full"
    }])js";
    CHECK_THROWS_AS(load_templates(bad), ValidationError);

    std::string missing_literal = R"js([{
        "id": "x", "qtype": "interaction",
        "text_pattern": "Which object did [P] [V]?",
        "program_skeleton": "Query_Objects(AllActions)",
        "answer_type": "object_set",
        "situation_policy": "full"
    }])js";
    CHECK_THROWS_AS(load_templates(missing_literal), ValidationError);
}

TEST_CASE("interaction binding on a single-action graph is unique") {
    SituationHypergraph g = make_graph("g", {{"tidy", "table", 0, 8}});
    std::vector<Binding> bindings = extract_bindings(g, template_by_id("int_doing"), default_vocabulary());
    REQUIRE(bindings.size() == 1);
    CHECK(bindings[0].at("O") == "table");
    CHECK(bindings[0].at("P") == "person");
}

TEST_CASE("sequence-after bindings exist exactly for anchors with a successor") {
    std::vector<Binding> bindings =
        extract_bindings(chain3(), template_by_id("seq_after"), default_vocabulary());
    REQUIRE(bindings.size() == 2);
    std::set<std::string> anchors;
    for (const auto& b : bindings) anchors.insert(b.at("V"));
    CHECK(anchors == std::set<std::string>{"take", "put_down"});
}

TEST_CASE("feasibility spatial template finds nothing without spatial triplets") {
    std::vector<Binding> bindings =
        extract_bindings(chain3(), template_by_id("fea_spatial"), default_vocabulary());
    CHECK(bindings.empty());
}

TEST_CASE("instantiation fills text and program") {
    Binding b{{"P", "person"}, {"V", "take"}, {"O", "cup"}};
    Instantiated inst = instantiate(template_by_id("seq_after"), b);
    CHECK(expand_language(inst.raw_text, default_vocabulary()) ==
          "What did the person do after they took the cup?");
    std::string program = print_program(inst.program);
    CHECK(program.find("take") != std::string::npos);
    CHECK(program.find("cup") != std::string::npos);
    CHECK(typecheck(inst.program).ok);
}

TEST_CASE("anchor verbs stay present tense for future questions") {
    Binding b{{"P", "person"}, {"V", "take"}, {"O", "cup"}};
    Instantiated inst = instantiate(template_by_id("pre_after"), b);
    CHECK(expand_language(inst.raw_text, default_vocabulary()) ==
          "What will the person do after they take the cup?");
}

TEST_CASE("instantiation rejects incomplete bindings") {
    Binding b{{"P", "person"}, {"V", "take"}};
    CHECK_THROWS_WITH_AS(instantiate(template_by_id("seq_after"), b), "missing placeholder [O]",
                         GenerationError);
}

TEST_CASE("all template-binding combinations over a sample corpus typecheck") {
    const Vocabulary& voc = default_vocabulary();
    for (const auto& g : star::testing::random_graphs(15, 321)) {
        SituationHypergraph gt = propagate_relations(g, voc, default_propagation_rules());
        for (const auto& t : default_templates()) {
            for (const auto& b : extract_bindings(gt, t, voc)) {
                Instantiated inst = instantiate(t, b);
                CHECK(typecheck(inst.program).ok);
            }
        }
    }
}

TEST_CASE("answers render the executed result") {
    SituationHypergraph g = chain3();
    Binding b{{"P", "person"}, {"V", "take"}, {"O", "cup"}};
    Instantiated inst = instantiate(template_by_id("seq_after"), b);
    // Brute force: the unique action after take-cup with minimal start is put_down-book.
    CHECK(generate_answer(inst.program, g, QType::Sequence, default_vocabulary()) == "put down the book");

    SituationHypergraph single = make_graph("g", {{"tidy", "table", 0, 8}});
    Instantiated inst2 = instantiate(template_by_id("int_doing"), Binding{{"P", "person"}, {"O", "table"}});
    CHECK(generate_answer(inst2.program, single, QType::Interaction, default_vocabulary()) ==
          "tidied up the table");
}

TEST_CASE("prediction answers start beyond the mask cutoff") {
    SituationHypergraph g = chain3();
    const Vocabulary& voc = default_vocabulary();
    Binding b{{"P", "person"}, {"V", "take"}, {"O", "cup"}};
    Instantiated inst = instantiate(template_by_id("pre_after"), b);

    auto target = prediction_mask_target(inst.program, g, voc);
    REQUIRE(target.has_value());
    CHECK(*target == "a0");  // the partially seen query action
    int cutoff = prediction_cutoff(*g.find_action(*target));

    auto answer_action = answer_witness_action(inst.program, g, voc);
    REQUIRE(answer_action.has_value());
    CHECK(g.find_action(*answer_action)->start > cutoff);

    SituationHypergraph masked = mask_for_prediction(g, *target);
    CHECK_THROWS_AS(execute(inst.program, masked, voc), Unanswerable);
}

TEST_CASE("feasibility masking removes the answer evidence") {
    SituationHypergraph g = make_graph("g", {{"take", "cup", 0, 9}, {"open", "door", 14, 25}});
    const Vocabulary& voc = default_vocabulary();
    Instantiated inst = instantiate(template_by_id("fea_object"), Binding{{"P", "person"}, {"O", "door"}});
    auto witness = answer_witness_action(inst.program, g, voc);
    REQUIRE(witness.has_value());
    SituationHypergraph masked = mask_for_feasibility(g, *witness);
    CHECK_THROWS_AS(execute(inst.program, masked, voc), Unanswerable);
    // The untouched question still works on the ground truth.
    CHECK(generate_answer(inst.program, g, QType::Feasibility, voc) == "open the door");
}

TEST_CASE("compositional distractors recombine situation content and fail the program") {
    SituationHypergraph g = make_graph("g", {{"take", "cup", 0, 9}, {"put_down", "book", 12, 21}});
    const Vocabulary& voc = default_vocabulary();
    Instantiated inst = instantiate(template_by_id("int_doing"), Binding{{"P", "person"}, {"O", "cup"}});
    std::string answer = generate_answer(inst.program, g, QType::Interaction, voc);
    CHECK(answer == "took the cup");

    std::string d = gen_compositional_distractor(g, inst.program, answer, ValueType::ActionSet,
                                                 QType::Interaction, std::nullopt, voc, 11);
    CHECK(d != answer);
    auto comp = parse_option(d, voc);
    REQUIRE(comp.has_value());
    // Both components occur in the situation and recombine validly.
    std::set<std::string> verbs{"take", "put_down"};
    std::set<std::string> objects{"cup", "book"};
    CHECK(verbs.count(*comp->verb) == 1);
    CHECK(objects.count(*comp->object) == 1);
    CHECK(validate_composition(*comp->verb, *comp->object, voc));
    // Falsified by the question's program on the ground truth.
    ExecValue check = execute(verify_form(inst.program, *comp), g, voc);
    CHECK_FALSE(check.boolean);
}

TEST_CASE("single-fact situations cannot produce a compositional distractor") {
    SituationHypergraph g = make_graph("g", {{"walk_through", "door", 0, 5}});
    const Vocabulary& voc = default_vocabulary();
    Instantiated inst = instantiate(template_by_id("int_doing"), Binding{{"P", "person"}, {"O", "door"}});
    std::string answer = generate_answer(inst.program, g, QType::Interaction, voc);
    CHECK_THROWS_AS(gen_compositional_distractor(g, inst.program, answer, ValueType::ActionSet,
                                                 QType::Interaction, std::nullopt, voc, 11),
                    GenerationError);
}

TEST_CASE("random distractors come from other situations, deterministically") {
    SituationHypergraph a = make_graph("sitA", {{"take", "cup", 0, 9}});
    SituationHypergraph b = make_graph("sitB", {{"open", "door", 0, 9}, {"wash", "dish", 12, 20}});
    std::vector<SituationHypergraph> corpus{a, b};
    const Vocabulary& voc = default_vocabulary();

    std::string d1 = gen_random_distractor(corpus, "sitA", "took the cup", {}, ValueType::ActionSet,
                                           QType::Interaction, std::nullopt, voc, 5);
    std::string d2 = gen_random_distractor(corpus, "sitA", "took the cup", {}, ValueType::ActionSet,
                                           QType::Interaction, std::nullopt, voc, 5);
    CHECK(d1 == d2);
    // Provenance: the option is one of sitB's facts, phrased like the answer type.
    CHECK((d1 == "opened the door" || d1 == "washed the dish"));

    auto comp = parse_option(d1, voc);
    REQUIRE(comp.has_value());
    CHECK(validate_composition(*comp->verb, *comp->object, voc));

    CHECK_THROWS_AS(gen_random_distractor({a}, "sitA", "x", {}, ValueType::ActionSet, QType::Interaction,
                                          std::nullopt, voc, 5),
                    GenerationError);
}

TEST_CASE("frequent distractors pick the most common answer, excluding the correct one") {
    AnswerStats stats;
    stats[QType::Sequence] = {{"opened the door", 10}, {"took the cup", 7}};
    CHECK(gen_frequent_distractor(stats, QType::Sequence, "washed the dish") == "opened the door");
    CHECK(gen_frequent_distractor(stats, QType::Sequence, "opened the door") == "took the cup");
    CHECK_THROWS_AS(gen_frequent_distractor(stats, QType::Prediction, "x"), GenerationError);
}

TEST_CASE("assembly shuffles options reproducibly and keeps provenance") {
    FunctionalProgram p = parse_program("Query_Earliest(AllActions)");
    std::array<std::pair<std::string, std::string>, 3> ds{
        {{"b", "compositional"}, {"c", "random"}, {"d", "frequent"}}};
    QAItem one = assemble_qa("i", "s", QType::Interaction, "Q?", p, "a", ds, 77);
    QAItem two = assemble_qa("i", "s", QType::Interaction, "Q?", p, "a", ds, 77);
    CHECK(one.options == two.options);
    CHECK(one.correct_index == two.correct_index);
    CHECK(one.options[static_cast<size_t>(one.correct_index)] == "a");
    CHECK(one.provenance[static_cast<size_t>(one.correct_index)] == "answer");

    std::array<std::pair<std::string, std::string>, 3> dup{
        {{"a", "compositional"}, {"c", "random"}, {"d", "frequent"}}};
    CHECK_THROWS_AS(assemble_qa("i", "s", QType::Interaction, "Q?", p, "a", dup, 77), GenerationError);
}

TEST_CASE("assembly places the answer uniformly across positions") {
    FunctionalProgram p = parse_program("Query_Earliest(AllActions)");
    std::array<std::pair<std::string, std::string>, 3> ds{
        {{"b", "compositional"}, {"c", "random"}, {"d", "frequent"}}};
    std::array<int, 4> counts{};
    for (int i = 0; i < 10000; ++i) {
        QAItem item = assemble_qa("i" + std::to_string(i), "s", QType::Interaction, "Q?", p, "a", ds,
                                  derive_seed(3, "assemble." + std::to_string(i)));
        counts[static_cast<size_t>(item.correct_index)] += 1;
    }
    for (int c : counts) CHECK(std::abs(c - 2500) <= 200);  // 25% within +/-2 points
}

TEST_CASE("generated corpora satisfy the answer-key and distractor contracts") {
    const Vocabulary& voc = default_vocabulary();
    GenResult result = small_corpus();
    REQUIRE(result.items.size() > 50);

    std::map<QType, int> per_type;
    for (const auto& item : result.items) {
        per_type[item.qtype] += 1;
        const SituationHypergraph& gt = result.gt.at(item.id);

        // Answer key: executing the program renders options[correct_index].
        ExecValue value = execute(item.program, gt, voc);
        CHECK(render_option(value, gt, item.qtype, voc) ==
              item.options[static_cast<size_t>(item.correct_index)]);

        // Every distractor fails the question's verify form on the ground truth.
        for (int i = 0; i < 4; ++i) {
            if (i == item.correct_index) continue;
            auto comp = parse_option(item.options[static_cast<size_t>(i)], voc);
            REQUIRE(comp.has_value());
            ExecValue check = execute(verify_form(item.program, *comp), gt, voc);
            CHECK_FALSE(check.boolean);
        }

        // Compositional options recombine in-situation content.
        for (int i = 0; i < 4; ++i) {
            if (item.provenance[static_cast<size_t>(i)] != "compositional") continue;
            auto comp = parse_option(item.options[static_cast<size_t>(i)], voc);
            REQUIRE(comp.has_value());
            std::set<std::string> verbs, objects;
            for (const auto& a : gt.actions) {
                verbs.insert(a.verb);
                objects.insert(a.object);
            }
            for (const auto& e : gt.entities)
                if (e.kind == NodeKind::Object) objects.insert(e.cls);
            if (comp->verb) CHECK(verbs.count(*comp->verb) == 1);
            if (comp->object) CHECK(objects.count(*comp->object) == 1);
        }

        CHECK_FALSE(has_placeholder_tokens(item.question));
        for (const auto& opt : item.options) CHECK_FALSE(has_placeholder_tokens(opt));
    }
    CHECK(per_type.size() == 4);
}

TEST_CASE("generation is a pure function of the seed and worker count") {
    GenResult a = small_corpus(7);
    GenResult b = small_corpus(7);
    CHECK(serialize_qa(a.items) == serialize_qa(b.items));

    GenConfig parallel;
    parallel.bindings_per_template = 2;
    parallel.workers = 4;
    GenResult c = generate_corpus(star::testing::random_graphs(12, 99), default_templates(),
                                  default_vocabulary(), default_propagation_rules(), parallel, 7);
    CHECK(serialize_qa(a.raw_items) == serialize_qa(c.raw_items));

    GenResult d = small_corpus(8);
    CHECK(serialize_qa(a.items) != serialize_qa(d.items));
}

TEST_CASE("qa corpus serialization round-trips") {
    GenResult result = small_corpus(7, 6);
    std::vector<QAItem> back = parse_qa(serialize_qa(result.items));
    CHECK(serialize_qa(back) == serialize_qa(result.items));
    REQUIRE(back.size() == result.items.size());
    CHECK(programs_equal(back[0].program, result.items[0].program));
}

TEST_CASE("masked prediction graphs expose exactly the hypothesis candidates") {
    // An action is a hypothesis candidate when its precondition frame is
    // visible but the action itself is no longer asserted. Exhaustive
    // enumeration over hyperedges must reproduce the mask's removals.
    const Vocabulary& voc = default_vocabulary();
    GenResult result = small_corpus(13);
    size_t prediction_items = 0;
    for (const auto& item : result.items) {
        if (item.qtype != QType::Prediction) continue;
        ++prediction_items;
        const SituationHypergraph& gt = result.gt.at(item.id);
        const SituationHypergraph& visible = result.visible.at(item.id);

        std::set<std::string> hypothesis;
        for (const auto& a : gt.actions) {
            bool precondition_visible = visible.find_frame(a.precondition_frame) != nullptr;
            bool asserted = visible.find_action(a.id) != nullptr;
            if (precondition_visible && !asserted) hypothesis.insert(a.id);
        }
        std::set<std::string> removed_with_visible_start;
        int max_visible = visible.frames.back().frame;
        for (const auto& a : gt.actions)
            if (!visible.find_action(a.id) && gt.frame_span("person").count(a.precondition_frame) &&
                a.precondition_frame <= max_visible)
                removed_with_visible_start.insert(a.id);
        CHECK(hypothesis == removed_with_visible_start);

        // Unanchored next-action questions keep their answer inside the
        // hypothesis set.
        if (item_template_key(item) == "pre_next") {
            auto witness = answer_witness_action(item.program, gt, voc);
            REQUIRE(witness.has_value());
            CHECK(hypothesis.count(*witness) == 1);
        }
    }
    CHECK(prediction_items > 0);
}

TEST_CASE("frequent distractors equal the recomputed pass-one argmax") {
    const Vocabulary& voc = default_vocabulary();
    GenResult result = small_corpus(7);
    AnswerStats stats = answer_stats(result.raw_items);

    for (const auto& item : result.raw_items) {
        int freq_index = -1;
        for (int i = 0; i < 4; ++i)
            if (item.provenance[static_cast<size_t>(i)] == "frequent") freq_index = i;
        if (freq_index < 0) continue;  // fallback items carry a random tag instead

        // Re-derive the attachment rule: highest-count answer of the qtype
        // group, skipping the item's other options and incompatible shapes.
        std::set<std::string> taken;
        for (int i = 0; i < 4; ++i)
            if (i != freq_index) taken.insert(item.options[static_cast<size_t>(i)]);
        std::vector<std::pair<std::string, int>> ranked(stats.at(item.qtype).begin(),
                                                        stats.at(item.qtype).end());
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            return std::tie(b.second, a.first) < std::tie(a.second, b.first);
        });
        bool action_answer =
            parse_option(item.options[static_cast<size_t>(item.correct_index)], voc)->verb.has_value();
        std::string expected;
        for (const auto& [content, count] : ranked) {
            if (taken.count(content)) continue;
            auto comp = parse_option(content, voc);
            if (!comp) continue;
            if (action_answer && !(comp->verb && comp->object)) continue;
            if (!action_answer && !(comp->object && !comp->verb)) continue;
            expected = content;
            break;
        }
        CHECK(item.options[static_cast<size_t>(freq_index)] == expected);
    }
}

TEST_CASE("every option in a generated corpus is a valid composition") {
    const Vocabulary& voc = default_vocabulary();
    GenResult result = small_corpus(21);
    for (const auto& item : result.raw_items) {
        for (const auto& option : item.options) {
            auto comp = parse_option(option, voc);
            REQUIRE_MESSAGE(comp.has_value(), option);
            if (comp->verb && comp->object) CHECK(validate_composition(*comp->verb, *comp->object, voc));
            if (comp->object && !comp->verb) CHECK(voc.is_object(*comp->object));
        }
    }
}
