#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

RunResult run(const std::string& args, const std::string& env = "") {
    const std::string out_path = "cli_stdout.tmp";
    const std::string err_path = "cli_stderr.tmp";
    std::string cmd = env + (env.empty() ? "" : " ") + OOVLEX_BIN + " " + args + " >" + out_path +
                      " 2>" + err_path;
    int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    std::remove(out_path.c_str());
    std::remove(err_path.c_str());
    return r;
}

// Deterministic 12-word corpus, every word frequent enough for min-count 2.
void write_fixture_corpus(const std::string& path) {
    std::ostringstream text;
    const char* words[12] = {"apple",  "banana", "cherry", "durian", "elder",  "fig",
                             "grape",  "melon",  "nutmeg", "olive",  "papaya", "quince"};
    for (int rep = 0; rep < 40; ++rep)
        for (int w = 0; w < 12; ++w)
            if (rep % (w + 1) == 0) text << words[w] << ' ';
    spit(path, text.str());
}

int count_lines(const std::string& s) {
    int n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

// One-hot text model whose "fern" row equals the "plants" row.
void write_onehot_model(const std::string& path) {
    spit(path,
         "4 4\n"
         "plants 1 0 0 0\n"
         "animals 0 1 0 0\n"
         "fern 1 0 0 0\n"
         "soil 0 0 1 0\n");
}

}  // namespace

TEST_CASE("build-vocab reports V and writes the dump") {
    write_fixture_corpus("cli_corpus.tmp");
    auto r = run("build-vocab --corpus cli_corpus.tmp --min-count 2 --out cli_vocab.tmp");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("V=") != std::string::npos);
    std::string dump = slurp("cli_vocab.tmp");
    CHECK(count_lines(dump) == 12);  // all 12 words appear at least twice
    CHECK(dump.find("apple\t40") != std::string::npos);

    auto r1 = run("build-vocab --corpus cli_corpus.tmp --min-count 1 --out cli_vocab.tmp");
    CHECK(r1.exit_code == 0);
    CHECK(count_lines(slurp("cli_vocab.tmp")) == 12);  // distinct-token count

    std::remove("cli_corpus.tmp");
    std::remove("cli_vocab.tmp");
}

TEST_CASE("missing corpus file exits 1 with a message on stderr") {
    auto r = run("build-vocab --corpus no_such_corpus.txt");
    CHECK(r.exit_code == 1);
    CHECK(!r.err.empty());
}

TEST_CASE("a corpus with no surviving tokens exits 2") {
    spit("cli_corpus.tmp", "each token here appears only once\n");
    auto r = run("build-vocab --corpus cli_corpus.tmp --min-count 5");
    CHECK(r.exit_code == 2);
    CHECK(!r.err.empty());
    std::remove("cli_corpus.tmp");
}

TEST_CASE("train is bit-reproducible for one worker and a fixed seed") {
    write_fixture_corpus("cli_corpus.tmp");
    for (const std::string model : {"sgns", "w2gm"}) {
        auto a = run("train --model " + model +
                     " --corpus cli_corpus.tmp --min-count 1 --dims 6 --epochs 2"
                     " --seed 7 --workers 1 --out cli_model_a.tmp");
        auto b = run("train --model " + model +
                     " --corpus cli_corpus.tmp --min-count 1 --dims 6 --epochs 2"
                     " --seed 7 --workers 1 --out cli_model_b.tmp");
        CHECK(a.exit_code == 0);
        CHECK(b.exit_code == 0);
        CHECK(slurp("cli_model_a.tmp") == slurp("cli_model_b.tmp"));
        CHECK(a.out.find("epoch 1/2") != std::string::npos);
    }
    std::remove("cli_corpus.tmp");
    std::remove("cli_model_a.tmp");
    std::remove("cli_model_b.tmp");
}

TEST_CASE("invalid training configuration exits 2") {
    write_fixture_corpus("cli_corpus.tmp");
    auto r = run("train --model w2gm --k 0 --corpus cli_corpus.tmp --out cli_model.tmp");
    CHECK(r.exit_code == 2);
    CHECK(!r.err.empty());
    std::remove("cli_corpus.tmp");
}

TEST_CASE("trained model files load back through the nn command") {
    write_fixture_corpus("cli_corpus.tmp");
    for (const std::string model : {"sgns", "w2gm"}) {
        auto t = run("train --model " + model +
                     " --corpus cli_corpus.tmp --min-count 1 --dims 6 --epochs 1"
                     " --seed 3 --out cli_model.tmp");
        REQUIRE(t.exit_code == 0);
        auto r = run("nn --model-file cli_model.tmp --word apple --k 4");
        CHECK(r.exit_code == 0);
        CHECK(count_lines(r.out) == 4);
    }
    std::remove("cli_corpus.tmp");
    std::remove("cli_model.tmp");
}

TEST_CASE("eval writes a schema-versioned report embedding the manifest") {
    write_onehot_model("cli_model.tmp");
    spit("cli_data.tmp",
         R"({"word":"sporophyte","context":"a fern","category":"plants","attributes":["fern"]})"
         "\n");

    auto r = run("eval --task 1 --model-file cli_model.tmp --dataset cli_data.tmp"
                 " --categories plants,animals --report cli_report.tmp");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("S1=1") != std::string::npos);

    auto j = nlohmann::json::parse(slurp("cli_report.tmp"));
    CHECK(j["schema_version"] == 1);
    CHECK(j["task"] == 1);
    CHECK(j["n"] == 1);
    CHECK(j["s1"].get<double>() == doctest::Approx(1.0));
    CHECK(j["accuracy"].get<double>() == doctest::Approx(1.0));
    REQUIRE(j.contains("manifest"));
    CHECK(j["manifest"]["subcommand"] == "eval");
    CHECK(j["manifest"]["config"].contains("window"));
    CHECK(j["manifest"].contains("timestamp"));
    REQUIRE(j["rows"].size() == 1);
    CHECK(j["rows"][0]["rank"] == 1);

    std::remove("cli_model.tmp");
    std::remove("cli_data.tmp");
    std::remove("cli_report.tmp");
}

TEST_CASE("eval task 2 defaults to K=5") {
    write_onehot_model("cli_model.tmp");
    spit("cli_data.tmp",
         R"({"word":"sporophyte","context":"a fern soil","category":"plants","attributes":["soil"]})"
         "\n");
    auto r = run("eval --task 2 --model-file cli_model.tmp --dataset cli_data.tmp"
                 " --report cli_report.tmp");
    CHECK(r.exit_code == 0);
    auto j = nlohmann::json::parse(slurp("cli_report.tmp"));
    CHECK(j["k"] == 5);
    CHECK(j["s2"].get<double>() == doctest::Approx(0.2));
    std::remove("cli_model.tmp");
    std::remove("cli_data.tmp");
    std::remove("cli_report.tmp");
}

TEST_CASE("eval rejects invalid datasets with exit 2") {
    write_onehot_model("cli_model.tmp");
    spit("cli_data.tmp", R"({"word":"x","context":"c","category":"p","attributes":[]})" "\n");
    auto r = run("eval --task 2 --model-file cli_model.tmp --dataset cli_data.tmp");
    CHECK(r.exit_code == 2);
    std::remove("cli_model.tmp");
    std::remove("cli_data.tmp");
}

TEST_CASE("nn failure modes exit 2") {
    write_onehot_model("cli_model.tmp");
    auto stopword_context = run("nn --model-file cli_model.tmp --context \"the of and\"");
    CHECK(stopword_context.exit_code == 2);
    auto kl_on_point = run("nn --model-file cli_model.tmp --word fern --metric kl");
    CHECK(kl_on_point.exit_code == 2);
    auto unknown_word = run("nn --model-file cli_model.tmp --word notavocabword");
    CHECK(unknown_word.exit_code == 2);
    std::remove("cli_model.tmp");
}

TEST_CASE("config file provides defaults that flags override") {
    write_fixture_corpus("cli_corpus.tmp");
    spit("cli_cfg.tmp", "[train]\ndims=4\nepochs=1\nmin-count=1\nseed=5\n");
    auto from_cfg = run("--config cli_cfg.tmp train --corpus cli_corpus.tmp"
                        " --out cli_model.tmp --model sgns");
    REQUIRE(from_cfg.exit_code == 0);
    CHECK(slurp("cli_model.tmp").rfind("12 4", 0) == 0);  // dims from config

    auto overridden = run("--config cli_cfg.tmp train --corpus cli_corpus.tmp"
                          " --out cli_model.tmp --model sgns --dims 3");
    REQUIRE(overridden.exit_code == 0);
    CHECK(slurp("cli_model.tmp").rfind("12 3", 0) == 0);  // flag wins

    std::remove("cli_corpus.tmp");
    std::remove("cli_cfg.tmp");
    std::remove("cli_model.tmp");
}

TEST_CASE("OOV_EMBED_THREADS sets the default worker count") {
    write_onehot_model("cli_model.tmp");
    spit("cli_data.tmp",
         R"({"word":"sporophyte","context":"a fern","category":"plants","attributes":["fern"]})"
         "\n");
    auto r = run("eval --task 1 --model-file cli_model.tmp --dataset cli_data.tmp"
                 " --categories plants,animals --report cli_report.tmp",
                 "OOV_EMBED_THREADS=3");
    CHECK(r.exit_code == 0);
    auto j = nlohmann::json::parse(slurp("cli_report.tmp"));
    CHECK(j["manifest"]["workers"] == 3);
    std::remove("cli_model.tmp");
    std::remove("cli_data.tmp");
    std::remove("cli_report.tmp");
}

TEST_CASE("convert-dataset joins contexts and attributes into JSONL") {
    spit("cli_ctx.tmp",
         "arachis\tArachis is a genus of flowering plants in the pea family.\n"
         "protea\tProtea is a genus of flowering plants native to southern Africa.\n");
    spit("cli_attr.tmp", "arachis\tpea, flower, fabaceae\nprotea\tflower, africa\n");
    auto r = run("convert-dataset --contexts cli_ctx.tmp --attributes cli_attr.tmp"
                 " --category plants --out cli_converted.tmp");
    CHECK(r.exit_code == 0);

    std::istringstream lines(slurp("cli_converted.tmp"));
    std::string line;
    int n = 0;
    while (std::getline(lines, line)) {
        auto j = nlohmann::json::parse(line);
        CHECK(j["category"] == "plants");
        CHECK(j["attributes"].size() >= 2);
        ++n;
    }
    CHECK(n == 2);

    // missing attributes for a context word is a validation failure
    spit("cli_attr.tmp", "arachis\tpea\n");
    auto bad = run("convert-dataset --contexts cli_ctx.tmp --attributes cli_attr.tmp"
                   " --category plants --out cli_converted.tmp");
    CHECK(bad.exit_code == 2);

    std::remove("cli_ctx.tmp");
    std::remove("cli_attr.tmp");
    std::remove("cli_converted.tmp");
}

TEST_CASE("unknown flags and missing subcommands exit 2") {
    CHECK(run("train --nonsense-flag 1").exit_code == 2);
    CHECK(run("").exit_code == 2);
    CHECK(run("--help").exit_code == 0);
}
