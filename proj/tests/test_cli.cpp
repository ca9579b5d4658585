#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "star/qagen.hpp"

namespace {

struct RunResult {
    int exit_code;
    std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(STAR_CLI_BIN) + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
    int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::string kVocab = std::string(STAR_DATA_DIR) + "/vocabulary.json";
const std::string kTemplates = std::string(STAR_DATA_DIR) + "/templates.json";

// Builds the shared fixture corpus once.
struct CliFixture {
    CliFixture() {
        RunResult synth = run_cli("synth --vocab " + kVocab + " --out /tmp/cli_sit.json --situations 16 --seed 3");
        REQUIRE(synth.exit_code == 0);
        RunResult gen = run_cli("generate --vocab " + kVocab + " --templates " + kTemplates +
                                " --in /tmp/cli_sit.json --out /tmp/cli_qa.json --seed 3");
        REQUIRE(gen.exit_code == 0);
    }
};

CliFixture& fixture() {
    static CliFixture f;
    return f;
}

}  // namespace

TEST_CASE("missing inputs fail fast with the error prefix") {
    RunResult r = run_cli("generate --vocab " + kVocab + " --templates /nope/missing.json --in /tmp/cli_sit.json --out /tmp/x.json");
    CHECK(r.exit_code != 0);
    CHECK(r.output.find("error:") != std::string::npos);

    RunResult no_sub = run_cli("");
    CHECK(no_sub.exit_code != 0);

    RunResult bad_flag = run_cli("synth --definitely-not-a-flag");
    CHECK(bad_flag.exit_code != 0);
    CHECK(bad_flag.output.find("error:") != std::string::npos);
}

TEST_CASE("generate is byte-identical across runs and worker counts") {
    fixture();
    RunResult again = run_cli("generate --vocab " + kVocab + " --templates " + kTemplates +
                              " --in /tmp/cli_sit.json --out /tmp/cli_qa2.json --seed 3 --workers 4");
    REQUIRE(again.exit_code == 0);
    CHECK(slurp("/tmp/cli_qa.json") == slurp("/tmp/cli_qa2.json"));
    CHECK(slurp("/tmp/cli_qa.visible.json") == slurp("/tmp/cli_qa2.visible.json"));
    CHECK(slurp("/tmp/cli_qa.gt.json") == slurp("/tmp/cli_qa2.gt.json"));
}

TEST_CASE("a fresh corpus validates cleanly") {
    fixture();
    RunResult r = run_cli("validate --vocab " + kVocab +
                          " --in /tmp/cli_qa.json --visible /tmp/cli_qa.visible.json --gt /tmp/cli_qa.gt.json");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("clean") != std::string::npos);
}

TEST_CASE("a corrupted answer key is reported by item id") {
    fixture();
    std::vector<star::QAItem> items = star::load_qa_file("/tmp/cli_qa.json");
    REQUIRE(!items.empty());
    items[0].correct_index = (items[0].correct_index + 1) % 4;
    std::ofstream out("/tmp/cli_qa_bad.json");
    out << star::serialize_qa(items);
    out.close();

    RunResult r = run_cli("validate --vocab " + kVocab +
                          " --in /tmp/cli_qa_bad.json --visible /tmp/cli_qa.visible.json --gt /tmp/cli_qa.gt.json");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find(items[0].id) != std::string::npos);
}

TEST_CASE("split then eval runs the baselines") {
    fixture();
    RunResult split = run_cli("split --in /tmp/cli_qa.json --ratios 6:1:1 --seed 3 --out /tmp/cli_split.json");
    REQUIRE(split.exit_code == 0);
    CHECK(split.output.find("train:") != std::string::npos);

    RunResult eval = run_cli("eval --in /tmp/cli_split.json --baseline random --seed 3");
    CHECK(eval.exit_code == 0);
    CHECK(eval.output.find("Interaction") != std::string::npos);

    RunResult freq = run_cli("eval --in /tmp/cli_split.json --baseline frequent");
    CHECK(freq.exit_code == 0);
}

TEST_CASE("stats emits distributions and flows") {
    fixture();
    RunResult r = run_cli("stats --in /tmp/cli_qa.json --vocab " + kVocab + " --out /tmp/cli_stats.json");
    REQUIRE(r.exit_code == 0);
    std::string report = slurp("/tmp/cli_stats.json");
    CHECK(report.find("max_flow_share") != std::string::npos);
    CHECK(report.find("uniformity") != std::string::npos);
}

TEST_CASE("config files fill unset flags and the command line wins") {
    fixture();
    std::ofstream cfg("/tmp/cli_cfg.json");
    cfg << R"({"vocab": ")" << kVocab << R"(", "situations": 5, "seed": 3, "out": "/tmp/cli_cfg_sit.json"})";
    cfg.close();
    RunResult r = run_cli("synth --config /tmp/cli_cfg.json --situations 4");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("wrote 4 situations") != std::string::npos);
}

TEST_CASE("degrade-eval prints a probability table") {
    fixture();
    RunResult r = run_cli("degrade-eval --in /tmp/cli_qa.json --gt /tmp/cli_qa.gt.json --vocab " + kVocab +
                          " --p-grid 0,0.3 --noise-seeds 2 --seed 3");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("1.0000") != std::string::npos);
}

TEST_CASE("SITU_SEED fills in when no seed flag is given") {
    fixture();
    RunResult a = run_cli("synth --vocab " + kVocab + " --out /tmp/cli_env_a.json --situations 4 --seed 99");
    REQUIRE(a.exit_code == 0);
    std::string cmd = "SITU_SEED=99 " + std::string(STAR_CLI_BIN) + " synth --vocab " + kVocab +
                      " --out /tmp/cli_env_b.json --situations 4 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);
    CHECK(slurp("/tmp/cli_env_a.json") == slurp("/tmp/cli_env_b.json"));
}

TEST_CASE("per-category noise flags run a single degradation point") {
    fixture();
    RunResult r = run_cli("degrade-eval --in /tmp/cli_qa.json --gt /tmp/cli_qa.gt.json --vocab " + kVocab +
                          " --noise-act 1.0 --noise-seeds 2 --seed 3");
    REQUIRE(r.exit_code == 0);
    // With every hyperedge dropped each item falls back to the random
    // baseline, so accuracy sits near a quarter.
    std::istringstream in(r.output);
    std::string line;
    std::getline(in, line);  // header
    REQUIRE(std::getline(in, line));
    double acc = std::stod(line.substr(line.find(' ')));
    CHECK(acc > 0.10);
    CHECK(acc < 0.40);
}

TEST_CASE("stats writes the flow table companion") {
    fixture();
    RunResult r = run_cli("stats --in /tmp/cli_qa.json --vocab " + kVocab + " --out /tmp/cli_stats2.json");
    REQUIRE(r.exit_code == 0);
    std::string tsv = slurp("/tmp/cli_stats2.flows.tsv");
    CHECK(tsv.rfind("source\ttarget\tcount\n", 0) == 0);
    CHECK(tsv.find("\t") != std::string::npos);
}
