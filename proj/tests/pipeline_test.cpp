#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "charisma/classifier.hpp"
#include "charisma/errors.hpp"
#include "charisma/metrics.hpp"
#include "charisma/pipeline.hpp"
#include "test_corpus.hpp"

namespace fs = std::filesystem;
using namespace charisma;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// Runs the installed CLI binary, captures combined output, returns the
// exit code (or -1 if the process did not exit normally).
int run_cli(const std::string& args, std::string* output = nullptr) {
    static int serial = 0;
    const std::string capture =
        (fs::temp_directory_path() / ("charisma-cli-out-" + std::to_string(++serial)))
            .string();
    const std::string command =
        std::string(CLI_BINARY) + " " + args + " > " + capture + " 2>&1";
    int status = std::system(command.c_str());
    if (output != nullptr) {
        *output = slurp(capture);
    }
    fs::remove(capture);
    if (status == -1 || !WIFEXITED(status)) {
        return -1;
    }
    return WEXITSTATUS(status);
}

struct TempTree {
    std::string root;
    TempTree() : root(testsupport::make_temp_dir("pipeline")) {}
    ~TempTree() { fs::remove_all(root); }
    std::string path(const std::string& name) const { return root + "/" + name; }
};

PipelineConfig sample_config() {
    PipelineConfig config;
    config.client.endpoint = "https://api.example.test/v1/chat/completions";
    config.client.model_name = "gpt-4o";
    config.client.api_key_env = "EXAMPLE_KEY";
    config.client.max_batch = 17;
    config.client.retry.max_retries = 5;
    config.client.retry.backoff_base_seconds = 0.25;
    config.client.rate_limit_rpm = 33;
    config.client.temperature = 0.7;
    config.split.test_fraction = 0.3;
    config.split.val_fraction_of_train = 0.2;
    config.split.seed = 11;
    config.split.stratified = false;
    config.encoding.vocab_path = "vocab.txt";
    config.encoding.max_length = 48;
    config.training.learning_rate = 3e-4;
    config.training.epochs = 7;
    config.training.batch_size = 8;
    config.training.seed = 21;
    config.training.encoder_name = "tiny-uncased";
    config.training.freeze_encoder = true;
    config.training.optimizer.weight_decay = 0.05;
    config.train_path = "data/train.jsonl";
    config.val_path = "data/val.jsonl";
    config.test_path = "data/test.jsonl";
    config.tau = 0.65;
    config.output_dir = "results";
    return config;
}

}  // namespace

TEST_CASE("pipeline config survives a json round trip") {
    PipelineConfig config = sample_config();
    auto object = pipeline_config_to_json(config);
    PipelineConfig back = pipeline_config_from_json(object);

    CHECK(back.client.endpoint == config.client.endpoint);
    CHECK(back.client.model_name == config.client.model_name);
    CHECK(back.client.api_key_env == config.client.api_key_env);
    CHECK(back.client.max_batch == config.client.max_batch);
    CHECK(back.client.retry.max_retries == config.client.retry.max_retries);
    CHECK(back.client.retry.backoff_base_seconds ==
          config.client.retry.backoff_base_seconds);
    CHECK(back.client.rate_limit_rpm == config.client.rate_limit_rpm);
    CHECK(back.client.temperature == config.client.temperature);
    CHECK(back.split.test_fraction == config.split.test_fraction);
    CHECK(back.split.val_fraction_of_train == config.split.val_fraction_of_train);
    CHECK(back.split.seed == config.split.seed);
    CHECK(back.split.stratified == config.split.stratified);
    CHECK(back.encoding.vocab_path == config.encoding.vocab_path);
    CHECK(back.encoding.max_length == config.encoding.max_length);
    CHECK(back.training.learning_rate == config.training.learning_rate);
    CHECK(back.training.epochs == config.training.epochs);
    CHECK(back.training.batch_size == config.training.batch_size);
    CHECK(back.training.seed == config.training.seed);
    CHECK(back.training.encoder_name == config.training.encoder_name);
    CHECK(back.training.freeze_encoder == config.training.freeze_encoder);
    CHECK(back.training.optimizer.weight_decay ==
          config.training.optimizer.weight_decay);
    CHECK(back.train_path == config.train_path);
    CHECK(back.val_path == config.val_path);
    CHECK(back.test_path == config.test_path);
    CHECK(back.tau == config.tau);
    CHECK(back.output_dir == config.output_dir);
}

TEST_CASE("partial configs fall back to defaults") {
    auto object = nlohmann::ordered_json::parse(R"({"scoring": {"tau": 0.9}})");
    PipelineConfig config = pipeline_config_from_json(object);
    CHECK(config.tau == 0.9);
    CHECK(config.client.endpoint == LLMClientConfig{}.endpoint);
    CHECK(config.split.test_fraction == 0.2);
    CHECK(config.training.epochs == 100);
    CHECK(config.output_dir == "out");
}

TEST_CASE("unknown config sections are rejected") {
    auto object = nlohmann::ordered_json::parse(R"({"splits": {"seed": 1}})");
    CHECK_THROWS_AS(pipeline_config_from_json(object), ConfigError);
}

TEST_CASE("load_pipeline_config rejects bad files") {
    TempTree tree;
    CHECK_THROWS_AS(load_pipeline_config(tree.path("absent.json")), ConfigError);

    const std::string garbled = tree.path("garbled.json");
    std::ofstream(garbled) << "{not json";
    CHECK_THROWS_AS(load_pipeline_config(garbled), ConfigError);

    const std::string array = tree.path("array.json");
    std::ofstream(array) << "[1, 2, 3]";
    CHECK_THROWS_AS(load_pipeline_config(array), ConfigError);

    const std::string good = tree.path("good.json");
    std::ofstream(good) << R"({"output_dir": "elsewhere"})";
    PipelineConfig config = load_pipeline_config(good);
    CHECK(config.output_dir == "elsewhere");
}

TEST_CASE("manifests record digests and stay deterministic") {
    TempTree tree;
    const std::string input = tree.path("input.txt");
    std::ofstream(input) << "hello manifest\n";

    auto config = pipeline_config_to_json(sample_config());
    auto manifest = make_manifest("split", config, {input}, {"a.jsonl", "b.jsonl"});
    CHECK(manifest.at("schema_version") == 1);
    CHECK(manifest.at("command") == "split");
    CHECK(manifest.at("config") == config);
    REQUIRE(manifest.at("inputs").size() == 1);
    CHECK(manifest.at("inputs").at(0).at("path") == input);
    const std::string digest =
        manifest.at("inputs").at(0).at("digest").get<std::string>();
    REQUIRE(digest.size() == 8 + 16);
    CHECK(digest.rfind("fnv1a64:", 0) == 0);
    for (std::size_t i = 8; i < digest.size(); ++i) {
        const char c = digest[i];
        CHECK(((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')));
    }
    CHECK(manifest.at("outputs") ==
          nlohmann::ordered_json::array({"a.jsonl", "b.jsonl"}));
    // no clocks or hostnames: a rerun produces the same bytes
    auto again = make_manifest("split", config, {input}, {"a.jsonl", "b.jsonl"});
    CHECK(manifest.dump() == again.dump());

    CHECK_THROWS_AS(make_manifest("x", config, {tree.path("absent")}, {}), IoError);
}

TEST_CASE("write_manifest emits parseable json") {
    TempTree tree;
    auto manifest = make_manifest("report", nlohmann::ordered_json::object(), {}, {});
    const std::string path = tree.path("manifest.json");
    write_manifest(path, manifest);
    auto parsed = nlohmann::ordered_json::parse(slurp(path));
    CHECK(parsed == manifest);

    CHECK_THROWS_AS(write_manifest(tree.path("no/such/dir/m.json"), manifest),
                    IoError);
}

TEST_CASE("cli rejects bad invocations") {
    std::string output;
    CHECK(run_cli("", &output) == 2);  // a subcommand is required
    CHECK(run_cli("--definitely-not-a-flag", &output) == 2);
    CHECK(run_cli("split", &output) == 2);  // missing positional
    CHECK(run_cli("generate --tactic metaphor_simile", &output) == 2);
    CHECK(run_cli("--help", &output) == 0);
    CHECK(output.find("generate") != std::string::npos);
    CHECK(output.find("score") != std::string::npos);
}

TEST_CASE("cli maps runtime failures to exit 1") {
    TempTree tree;
    std::string output;
    CHECK(run_cli("curate /no/such/corpus.jsonl " + tree.path("out.jsonl"),
                  &output) == 1);
    CHECK(output.find("error:") != std::string::npos);

    CHECK(run_cli("generate --tactic sarcasm --count 5 --out " +
                      tree.path("g.jsonl"),
                  &output) == 1);
    CHECK(output.find("error:") != std::string::npos);

    CHECK(run_cli("--config /no/such/config.json report whatever.json", &output) == 1);
}

TEST_CASE("cli generate against the mock endpoint is reproducible") {
    TempTree tree;
    const std::string first = tree.path("first.jsonl");
    const std::string second = tree.path("second.jsonl");
    std::string output;
    REQUIRE(run_cli("generate --tactic ambitious_goals --count 12 --out " + first,
                    &output) == 0);
    CHECK(output.find("12") != std::string::npos);
    REQUIRE(run_cli("generate --tactic ambitious_goals --count 12 --out " + second,
                    &output) == 0);

    Corpus corpus = load_corpus(first);
    REQUIRE(corpus.size() == 12);
    for (const auto& s : corpus.sentences) {
        CHECK(s.label == CLTLabel::ambitious_goals);
        CHECK(s.source == SentenceSource::generated);
    }
    CHECK(slurp(first) == slurp(second));

    auto manifest = nlohmann::ordered_json::parse(slurp(first + ".manifest.json"));
    CHECK(manifest.at("command") == "generate");
    CHECK(manifest.at("tactic") == "ambitious_goals");
    CHECK(manifest.at("target_count") == 12);
    CHECK(manifest.at("kept").get<int>() >= 12);
    CHECK(manifest.at("config").at("client").at("endpoint") == "mock://numbered");
}

TEST_CASE("cli generate mints distinct ids across tactics") {
    TempTree tree;
    const std::string goals = tree.path("goals.jsonl");
    const std::string contrast = tree.path("contrast.jsonl");
    REQUIRE(run_cli("generate --tactic ambitious_goals --count 8 --out " + goals,
                    nullptr) == 0);
    REQUIRE(run_cli("generate --tactic contrast --count 8 --out " + contrast,
                    nullptr) == 0);

    // Per-tactic corpora are meant to be concatenated; ids must not collide.
    const std::string merged = tree.path("merged.jsonl");
    std::ofstream out(merged, std::ios::binary);
    out << slurp(goals) << slurp(contrast);
    out.close();
    Corpus corpus = load_corpus(merged);
    CHECK(corpus.size() == 16);
}

TEST_CASE("cli split is deterministic for a fixed seed") {
    TempTree tree;
    Corpus corpus = testsupport::synthetic_corpus(20, 7);
    const std::string in = tree.path("corpus.jsonl");
    save_corpus(corpus, in);

    std::string output;
    REQUIRE(run_cli("split " + in + " --seed 5", &output) == 0);
    const std::string train1 = slurp(in + ".train");
    const std::string val1 = slurp(in + ".val");
    const std::string test1 = slurp(in + ".test");
    auto manifest1 = nlohmann::ordered_json::parse(slurp(in + ".split-manifest.json"));

    REQUIRE(run_cli("split " + in + " --seed 5", &output) == 0);
    CHECK(slurp(in + ".train") == train1);
    CHECK(slurp(in + ".val") == val1);
    CHECK(slurp(in + ".test") == test1);
    auto manifest2 = nlohmann::ordered_json::parse(slurp(in + ".split-manifest.json"));
    CHECK(manifest1 == manifest2);

    CHECK(manifest1.at("split").at("seed") == 5);
    const auto& sizes = manifest1.at("split").at("sizes");
    CHECK(sizes.at("train").get<int>() + sizes.at("val").get<int>() +
              sizes.at("test").get<int>() ==
          static_cast<int>(corpus.size()));

    // a different seed shuffles differently
    REQUIRE(run_cli("split " + in + " --seed 6", &output) == 0);
    CHECK(slurp(in + ".train") != train1);
}

TEST_CASE("cli curate writes a review file on request") {
    TempTree tree;
    Corpus corpus;
    LabeledSentence a;
    a.id = "a";
    a.text = "A steady bridge carries the village forward every day.";
    a.label = CLTLabel::metaphor_simile;
    a.source = SentenceSource::generated;
    LabeledSentence b = a;
    b.id = "b";
    b.text = "A steady bridge carries the village forward every day!";
    LabeledSentence c = a;
    c.id = "c";
    c.text = "Too short.";
    corpus.sentences = {a, b, c};
    const std::string in = tree.path("raw.jsonl");
    const std::string out = tree.path("curated.jsonl");
    save_corpus(corpus, in);

    std::string output;
    REQUIRE(run_cli("curate " + in + " " + out + " --review", &output) == 0);
    CHECK(output.find("kept 1") != std::string::npos);
    CHECK(output.find("rejected 2") != std::string::npos);

    Corpus curated = load_corpus(out);
    REQUIRE(curated.size() == 1);
    CHECK(curated.sentences[0].id == "a");

    Corpus rejected = load_corpus(out + ".rejected.jsonl");
    REQUIRE(rejected.size() == 2);
    for (const auto& s : rejected.sentences) {
        CHECK(s.meta.count("reject_reason") == 1);
    }

    auto manifest = nlohmann::ordered_json::parse(slurp(out + ".manifest.json"));
    CHECK(manifest.at("kept") == 1);
    CHECK(manifest.at("rejected") == 2);
    CHECK(manifest.at("reasons").is_object());
}

TEST_CASE("cli ingest-vuamc reads the fixture") {
    TempTree tree;
    const std::string out = tree.path("vuamc.jsonl");
    std::string output;
    REQUIRE(run_cli("ingest-vuamc " FIXTURE_DIR "/vuamc_fixture.xml --out " + out,
                    &output) == 0);
    Corpus corpus = load_corpus(out);
    CHECK(corpus.size() == 5);
    for (const auto& s : corpus.sentences) {
        CHECK(s.label == CLTLabel::metaphor_simile);
        CHECK(s.source == SentenceSource::vuamc);
    }
}

TEST_CASE("cli score emits a profile for a raw document") {
    TempTree tree;
    Corpus corpus = testsupport::synthetic_corpus(5, 3);
    Checkpoint ckpt;
    ckpt.vocab_lines = testsupport::build_vocab_lines(corpus);
    ckpt.spec = encoder_preset("tiny-uncased");
    ckpt.spec.vocab_size = static_cast<int>(ckpt.vocab_lines.size());
    ckpt.params = init_parameters<float>(ckpt.spec, 5);
    ckpt.encoding.max_length = 32;
    const auto labels = all_labels();
    ckpt.label_order.assign(labels.begin(), labels.end());
    const std::string ckpt_dir = tree.path("ckpt");
    save_checkpoint(ckpt, ckpt_dir);

    const std::string doc = tree.path("speech.txt");
    std::ofstream(doc) << "Together we tend the garden. Why would the harbor wait?\n";

    std::string output;
    REQUIRE(run_cli("--output-dir " + tree.path("scored") + " score " + ckpt_dir +
                        " " + doc + " --tau 0.05",
                    &output) == 0);
    CHECK(output.find("2 sentences") != std::string::npos);

    const std::string profile_path = tree.path("scored") + "/speech-profile.json";
    auto profile = nlohmann::ordered_json::parse(slurp(profile_path));
    CHECK(profile.at("document_id") == "speech");
    CHECK(profile.at("n_sentences") == 2);
    CHECK(profile.at("confidence_threshold") == 0.05);

    auto manifest =
        nlohmann::ordered_json::parse(slurp(profile_path + ".manifest.json"));
    CHECK(manifest.at("command") == "score");
    CHECK(manifest.at("tau") == 0.05);
}

TEST_CASE("cli report round trips a metrics file") {
    TempTree tree;
    std::vector<int> y_true, y_pred;
    for (int c = 0; c < 9; ++c) {
        for (int i = 0; i < 4; ++i) {
            y_true.push_back(c);
            y_pred.push_back(i == 0 ? (c + 1) % 9 : c);
        }
    }
    std::vector<CLTLabel> t, p;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        t.push_back(label_from_index(y_true[i]));
        p.push_back(label_from_index(y_pred[i]));
    }
    auto cm = confusion_matrix(t, p);
    auto report = metrics_report(cm);
    const std::string metrics_path = tree.path("metrics.json");
    write_metrics_report(report, metrics_path);

    std::string output;
    REQUIRE(run_cli("--output-dir " + tree.path("rep") + " report " + metrics_path,
                    &output) == 0);
    CHECK(output.find("Metaphor/Simile") != std::string::npos);
    CHECK(output.find("accuracy") != std::string::npos);
    CHECK(fs::exists(tree.path("rep") + "/report-manifest.json"));

    CHECK(run_cli("report " + tree.path("absent.json")) == 1);
}
