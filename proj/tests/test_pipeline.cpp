#include "emoxpt/error.hpp"
#include "emoxpt/io.hpp"
#include "emoxpt/pipeline.hpp"
#include "test_support.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <set>
#include <sys/wait.h>

using namespace emoxpt;
using namespace emoxpt::testing;
namespace fs = std::filesystem;

namespace {

PipelineConfig sample_config(const fs::path& out) {
    auto cfg = load_config(data_dir() / "sample.conf", {{"output.dir", out.string()}});
    return cfg;
}

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args, const std::string& tag) {
    const auto dir = fs::temp_directory_path() / "emoxpt_test_cli_io";
    fs::create_directories(dir);
    const auto out = dir / (tag + ".out");
    const auto err = dir / (tag + ".err");
    const std::string cmd =
        std::string("\"") + EMOXPT_CLI_PATH + "\" " + args + " > \"" + out.string() + "\" 2> \"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_text_file(out);
    r.err = read_text_file(err);
    return r;
}

void check_error_line(const std::string& err, const std::string& error, const std::string& stage) {
    CHECK(std::count(err.begin(), err.end(), '\n') == 1);
    const auto j = nlohmann::json::parse(err);
    CHECK(j["error"] == error);
    if (stage.empty()) CHECK(j["stage"].is_null());
    else CHECK(j["stage"] == stage);
    CHECK(j["message"].is_string());
}

std::set<std::string> files_under(const fs::path& root) {
    std::set<std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) out.insert(fs::relative(e.path(), root).generic_string());
    return out;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("config parsing") {
    const auto map = parse_config_text("# comment\n a.b = 1 \n\nc = x y\n");
    CHECK(map == ConfigMap{{"a.b", "1"}, {"c", "x y"}});
    CHECK_THROWS_AS(parse_config_text("novalue\n"), Error);

    const auto cfg = load_config(data_dir() / "sample.conf");
    CHECK(cfg.corpus_path == data_dir() / "sample_corpus.jsonl");
    CHECK(cfg.embedding.hash_dim == std::optional<std::size_t>{8});
    CHECK(cfg.embedding.hash_seed == 7);
    CHECK(cfg.kmeans.seed == 11);
    CHECK(cfg.tsne.seed == 5);
    CHECK(cfg.k == 2);

    auto code = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::IoError;
    };
    CHECK(code([] { config_from_map({{"bogus.key", "1"}}, "."); }) == ErrorCode::ConfigError);
    CHECK(code([] { config_from_map({{"kmeans.k", "two"}}, "."); }) == ErrorCode::ConfigError);
    const auto over = load_config(data_dir() / "sample.conf", {{"kmeans.seed", "99"}});
    CHECK(over.kmeans.seed == 99);
}

TEST_CASE("both embedding sources fail validation before any work") {
    const auto out = fresh_dir("both_sources") / "out";
    auto cfg = sample_config(out);
    cfg.embedding.table = data_dir() / "toy_vectors.txt";
    try {
        validate_config(cfg);
        FAIL("expected ConfigError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigError);
    }
    CHECK_THROWS_AS(run_pipeline(cfg), Error);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("sample pipeline writes the full artifact set deterministically") {
    const auto root = fresh_dir("pipeline_det");
    const auto r1 = run_pipeline(sample_config(root / "a"));
    const auto r2 = run_pipeline(sample_config(root / "b"));

    for (const char* v : {"human_word", "llm_word", "human_sentence", "llm_sentence"}) {
        const auto metrics = nlohmann::json::parse(read_text_file(root / "a" / "clusters" / (std::string(v) + "_metrics.json")));
        CHECK(metrics["k"] == 2);
        CHECK(metrics.contains("silhouette_mean"));
        CHECK(fs::exists(root / "a" / "projections" / (std::string(v) + ".svg")));
    }

    const auto manifest_a = read_text_file(root / "a" / "manifest.json");
    CHECK(manifest_a == read_text_file(root / "b" / "manifest.json"));
    const auto m = nlohmann::json::parse(manifest_a);
    CHECK(m["complete"] == true);
    std::set<std::string> listed;
    for (const auto& f : m["files"]) {
        listed.insert(f["path"].get<std::string>());
        CHECK(f["sha256"] == sha256_hex(read_text_file(root / "a" / f["path"].get<std::string>())));
    }
    auto on_disk = files_under(root / "a");
    on_disk.erase("manifest.json");
    CHECK(listed == on_disk);
    CHECK(r1.files.size() == r2.files.size());

    const auto report = read_text_file(root / "a" / "report" / "report.txt");
    for (const char* needle : {"LWrd", "HWrd", "HCmnt", "LRspn", "Human Comments", "LLM Responses", "verdict (word)",
                               "verdict (sentence)"})
        CHECK_MESSAGE(report.find(needle) != std::string::npos, needle);

    // Rerunning into the same directory replaces stale stage output.
    write_text_file(root / "a" / "clusters" / "stale.csv", "x\n");
    run_pipeline(sample_config(root / "a"));
    CHECK_FALSE(fs::exists(root / "a" / "clusters" / "stale.csv"));
    CHECK(read_text_file(root / "a" / "manifest.json") == manifest_a);
}

TEST_CASE("stage failures name the stage and leave an incomplete manifest") {
    const auto root = fresh_dir("pipeline_fail");
    write_text_file(root / "dup.jsonl",
                    R"({"id":"t1","date":"2023-03-01","hashtags":[],"tweet":"a","response":"b","comments":[]})"
                    "\n"
                    R"({"id":"t1","date":"2023-03-02","hashtags":[],"tweet":"a","response":"b","comments":[]})"
                    "\n");
    auto cfg = sample_config(root / "out");
    cfg.corpus_path = root / "dup.jsonl";
    try {
        run_pipeline(cfg);
        FAIL("expected StageError");
    } catch (const StageError& e) {
        CHECK(e.stage() == "load");
        CHECK(e.code() == ErrorCode::DuplicateId);
    }
    const auto m = nlohmann::json::parse(read_text_file(root / "out" / "manifest.json"));
    CHECK(m["complete"] == false);
}

TEST_CASE("cli exit codes and error lines") {
    const auto root = fresh_dir("cli_codes");
    const auto ok = run_cli("pipeline --config " + q(data_dir() / "sample.conf") + " --out " + q(root / "ok"), "ok");
    CHECK(ok.exit_code == 0);
    CHECK(ok.err.empty());
    CHECK(fs::exists(root / "ok" / "manifest.json"));

    const auto both = run_cli("pipeline --config " + q(data_dir() / "sample.conf") + " --out " + q(root / "both") +
                                  " --set embedding.table=" + q(data_dir() / "toy_vectors.txt"),
                              "both");
    CHECK(both.exit_code == 1);
    check_error_line(both.err, "ConfigError", "config");

    const auto usage = run_cli("cluster --k 2", "usage");
    CHECK(usage.exit_code == 1);
    check_error_line(usage.err, "UsageError", "");

    write_text_file(root / "dup.jsonl",
                    R"({"id":"t1","date":"2023-03-01","hashtags":[],"tweet":"a","response":"b","comments":[]})"
                    "\n"
                    R"({"id":"t1","date":"2023-03-02","hashtags":[],"tweet":"a","response":"b","comments":[]})"
                    "\n");
    const auto stage = run_cli("pipeline --config " + q(data_dir() / "sample.conf") + " --out " + q(root / "dup") +
                                   " --set corpus.path=" + q(root / "dup.jsonl"),
                               "stage");
    CHECK(stage.exit_code == 2);
    check_error_line(stage.err, "DuplicateId", "load");
}

TEST_CASE("stage subcommands reproduce the pipeline artifacts") {
    const auto root = fresh_dir("cli_chain");
    run_pipeline(sample_config(root / "pipe"));
    const auto pipe = root / "pipe";
    const auto step = root / "step";
    const std::string corpus = " --corpus " + q(data_dir() / "sample_corpus.jsonl");
    const std::string lists =
        " --stopwords " + q(data_dir() / "stopwords_en.txt") + " --neutral " + q(data_dir() / "neutral_llm.txt");
    const std::string hash = " --hash-dim 8 --hash-seed 7";

    REQUIRE(run_cli("eda" + corpus + lists + " --top-k 30 --out " + q(step / "eda"), "eda").exit_code == 0);
    for (const auto& f : files_under(pipe / "eda"))
        CHECK_MESSAGE(read_text_file(step / "eda" / f) == read_text_file(pipe / "eda" / f), f);

    REQUIRE(run_cli("clean --class human" + corpus + lists + " --out " + q(step / "human.jsonl"), "c1").exit_code == 0);
    REQUIRE(run_cli("clean --class llm" + corpus + lists + " --out " + q(step / "llm.jsonl"), "c2").exit_code == 0);
    CHECK(read_text_file(step / "human.jsonl") == read_text_file(pipe / "cleaned" / "human_comments.jsonl"));
    CHECK(read_text_file(step / "llm.jsonl") == read_text_file(pipe / "cleaned" / "llm_responses.jsonl"));

    for (const std::string group : {"human", "llm"}) {
        const std::string v = group + "_sentence";
        REQUIRE(run_cli("embed --tokens " + q(step / (group + ".jsonl")) + " --level sentence" + hash + " --out " +
                            q(step / (v + ".csv")),
                        "e" + group)
                    .exit_code == 0);
        CHECK(read_text_file(step / (v + ".csv")) == read_text_file(pipe / "embeddings" / (v + ".csv")));
        REQUIRE(run_cli("cluster --embeddings " + q(step / (v + ".csv")) + " --level sentence --k 2 --seed 11 --out-dir " +
                            q(step) + " --name " + v,
                        "k" + group)
                    .exit_code == 0);
        CHECK(read_text_file(step / (v + "_metrics.json")) == read_text_file(pipe / "clusters" / (v + "_metrics.json")));
        CHECK(read_text_file(step / (v + "_assignments.csv")) ==
              read_text_file(pipe / "clusters" / (v + "_assignments.csv")));
        REQUIRE(run_cli("project --embeddings " + q(step / (v + ".csv")) + " --assignments " +
                            q(step / (v + "_assignments.csv")) + " --level sentence --seed 5 --out " +
                            q(step / (v + ".svg")),
                        "p" + group)
                    .exit_code == 0);
        CHECK(read_text_file(step / (v + "_coords.csv")) == read_text_file(pipe / "projections" / (v + "_coords.csv")));
        CHECK(fs::exists(step / (v + ".svg")));
    }

    REQUIRE(run_cli("report --level sentence --lexicon " + q(data_dir() / "lexicon_seed.txt") + hash +
                        " --human-tokens " + q(step / "human.jsonl") + " --human-embeddings " +
                        q(step / "human_sentence.csv") + " --human-assignments " +
                        q(step / "human_sentence_assignments.csv") + " --llm-tokens " + q(step / "llm.jsonl") +
                        " --llm-embeddings " + q(step / "llm_sentence.csv") + " --llm-assignments " +
                        q(step / "llm_sentence_assignments.csv") + " --out " + q(step),
                    "report")
                .exit_code == 0);
    const auto mine = nlohmann::json::parse(read_text_file(step / "sentence_report.json"));
    const auto theirs = nlohmann::json::parse(read_text_file(pipe / "report" / "report.json"));
    CHECK(mine == theirs["sentence"]);
}
