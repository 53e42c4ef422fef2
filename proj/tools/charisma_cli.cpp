// Command line entry point tying the pipeline stages together. Every
// subcommand echoes its effective configuration and input digests into a
// manifest next to its primary output so runs can be reproduced exactly.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "charisma/classifier.hpp"
#include "charisma/corpus.hpp"
#include "charisma/dataset.hpp"
#include "charisma/digest.hpp"
#include "charisma/generation.hpp"
#include "charisma/metrics.hpp"
#include "charisma/pipeline.hpp"
#include "charisma/scoring.hpp"
#include "charisma/vuamc.hpp"

namespace fs = std::filesystem;
using namespace charisma;

namespace {

struct CliState {
    std::string config_path;
    std::string output_dir_flag;
    PipelineConfig config;

    void finalize() {
        if (!config_path.empty()) {
            config = load_pipeline_config(config_path);
        }
        if (!output_dir_flag.empty()) {
            config.output_dir = output_dir_flag;
        }
    }

    std::string out_path(const std::string& name) const {
        return config.output_dir + "/" + name;
    }
};

void ensure_parent_dir(const std::string& path) {
    fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) {
        fs::create_directories(parent);
    }
}

void emit_manifest(const CliState& state, const std::string& command,
                   const std::vector<std::string>& inputs,
                   const std::vector<std::string>& outputs,
                   const std::string& manifest_path,
                   const nlohmann::ordered_json& extra = {}) {
    auto manifest =
        make_manifest(command, pipeline_config_to_json(state.config), inputs, outputs);
    for (auto it = extra.begin(); it != extra.end(); ++it) {
        manifest[it.key()] = it.value();
    }
    ensure_parent_dir(manifest_path);
    write_manifest(manifest_path, manifest);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void print_curation_report(const CurationReport& report) {
    std::cout << "kept " << report.kept << ", rejected " << report.rejected;
    bool first = true;
    for (const auto& [reason, count] : report.reasons) {
        if (count == 0) {
            continue;
        }
        std::cout << (first ? " (" : ", ") << reject_reason_name(reason) << " "
                  << count;
        first = false;
    }
    if (!first) {
        std::cout << ")";
    }
    std::cout << "\n";
}

int run_generate(CliState& state, const std::string& tactic_name, int count,
                 std::string out) {
    CLTLabel tactic = parse_label(tactic_name);
    // One id stream per (seed, tactic): reruns stay byte-identical while
    // corpora for different tactics never collide on ids.
    seed_sentence_ids(state.config.split.seed ^ fnv1a64(tactic_name));
    if (out.empty()) {
        out = state.out_path("generated-" + tactic_name + ".jsonl");
    }
    ensure_parent_dir(out);

    GenerationJob job;
    job.tmpl = default_prompt_template(tactic);
    job.target_count = count;

    Corpus corpus;
    CurationReport report;
    bool partial = false;
    std::string failure;
    try {
        std::tie(corpus, report) = run_job(state.config.client, job);
    } catch (const PartialResultError& e) {
        corpus = e.partial();
        report = e.report();
        partial = true;
        failure = e.what();
    }
    save_corpus(corpus, out);
    emit_manifest(state, "generate", {}, {out}, out + ".manifest.json",
                  {{"tactic", tactic_name},
                   {"target_count", count},
                   {"batches", job.batches.size()},
                   {"kept", report.kept},
                   {"rejected", report.rejected}});
    print_curation_report(report);
    if (partial) {
        std::cerr << "error: " << failure << "\n";
        std::cerr << "partial corpus written to " << out << "\n";
        return 1;
    }
    std::cout << "wrote " << corpus.size() << " sentences to " << out << "\n";
    return 0;
}

int run_ingest(CliState& state, const std::string& xml_path, std::string out) {
    if (out.empty()) {
        out = state.out_path("vuamc.jsonl");
    }
    ensure_parent_dir(out);
    auto sentences = ingest_vuamc(xml_path);
    Corpus corpus;
    corpus.sentences = std::move(sentences);
    save_corpus(corpus, out);
    emit_manifest(state, "ingest-vuamc", {xml_path}, {out}, out + ".manifest.json",
                  {{"sentences", corpus.size()}});
    std::cout << "ingested " << corpus.size() << " metaphor sentences to " << out
              << "\n";
    return 0;
}

int run_curate(CliState& state, const std::string& in, const std::string& out,
               bool review) {
    Corpus corpus = load_corpus(in);
    std::vector<RejectedSentence> rejects;
    auto [kept, report] = curate(corpus.sentences, review ? &rejects : nullptr);
    Corpus curated;
    curated.sentences = std::move(kept);
    ensure_parent_dir(out);
    save_corpus(curated, out);

    std::vector<std::string> outputs = {out};
    if (review) {
        Corpus rejected;
        for (auto& r : rejects) {
            LabeledSentence s = r.sentence;
            s.meta["reject_reason"] = std::string(reject_reason_name(r.reason));
            rejected.sentences.push_back(std::move(s));
        }
        const std::string review_path = out + ".rejected.jsonl";
        save_corpus(rejected, review_path);
        outputs.push_back(review_path);
        std::cout << "review file: " << review_path << "\n";
    }
    nlohmann::ordered_json reasons;
    for (const auto& [reason, count] : report.reasons) {
        reasons[std::string(reject_reason_name(reason))] = count;
    }
    emit_manifest(state, "curate", {in}, outputs, out + ".manifest.json",
                  {{"kept", report.kept},
                   {"rejected", report.rejected},
                   {"reasons", reasons}});
    print_curation_report(report);
    return 0;
}

int run_split(CliState& state, const std::string& in) {
    Corpus corpus = load_corpus(in);
    DatasetSplits splits = split(corpus, state.config.split);
    const std::string train_path = in + ".train";
    const std::string val_path = in + ".val";
    const std::string test_path = in + ".test";
    save_corpus(splits.train, train_path);
    save_corpus(splits.val, val_path);
    save_corpus(splits.test, test_path);
    emit_manifest(state, "split", {in}, {train_path, val_path, test_path},
                  in + ".split-manifest.json",
                  {{"split", split_summary(splits, state.config.split)}});
    std::cout << "train " << splits.train.size() << ", val " << splits.val.size()
              << ", test " << splits.test.size() << "\n";
    return 0;
}

int run_train(CliState& state, std::string train_path, std::string val_path,
              std::string out) {
    if (train_path.empty()) {
        train_path = state.config.train_path;
    }
    if (val_path.empty()) {
        val_path = state.config.val_path;
    }
    if (train_path.empty()) {
        throw ConfigError("no training corpus given (flag --train or config data.train)");
    }
    if (out.empty()) {
        out = state.config.output_dir;
    }

    Corpus train_corpus = load_corpus(train_path);
    Corpus val_corpus;
    std::vector<std::string> inputs = {train_path};
    if (!val_path.empty()) {
        val_corpus = load_corpus(val_path);
        inputs.push_back(val_path);
    }

    TrainResult result =
        train(train_corpus, val_corpus, state.config.encoding, state.config.training);

    const std::string best_dir = out + "/checkpoint-best";
    const std::string last_dir = out + "/checkpoint-last";
    save_checkpoint(result.best, best_dir);
    save_checkpoint(result.last, last_dir);

    emit_manifest(state, "train", inputs, {best_dir, last_dir},
                  out + "/train-manifest.json",
                  {{"epochs_run", result.history.epochs.size()},
                   {"best_epoch", result.history.best_epoch}});
    const auto& final_epoch = result.history.epochs.back();
    std::cout << "trained " << result.history.epochs.size() << " epochs, final train loss "
              << final_epoch.train_loss << ", val accuracy " << final_epoch.val_accuracy
              << "\n";
    std::cout << "best checkpoint (epoch " << result.history.best_epoch << "): "
              << best_dir << "\n";
    return 0;
}

int run_evaluate(CliState& state, const std::string& ckpt_dir,
                 const std::string& test_path) {
    Checkpoint ckpt = load_checkpoint(ckpt_dir);
    Corpus test = load_corpus(test_path);
    EvaluationResult result = evaluate(ckpt, test);

    const std::string metrics_path = state.out_path("metrics.json");
    const std::string figure_path = state.out_path("confusion.svg");
    ensure_parent_dir(metrics_path);
    write_metrics_report(result.report, metrics_path);
    render_confusion_matrix(result.cm, figure_path);

    emit_manifest(state, "evaluate", {test_path},
                  {metrics_path, figure_path, state.out_path("confusion.csv")},
                  state.out_path("evaluate-manifest.json"),
                  {{"checkpoint", ckpt_dir}});
    std::cout << format_metrics_report(result.report);
    std::cout << "metrics: " << metrics_path << "\n";
    std::cout << "figure: " << figure_path << "\n";
    return 0;
}

int run_score(CliState& state, const std::string& ckpt_dir, const std::string& doc_path,
              double tau_flag, bool tau_given) {
    Checkpoint ckpt = load_checkpoint(ckpt_dir);
    const std::string text = read_text_file(doc_path);
    const double tau = tau_given ? tau_flag : state.config.tau;
    const std::string doc_id = fs::path(doc_path).stem().string();

    DocumentProfile profile = score_document(ckpt, doc_id, text, tau);
    const std::string out = state.out_path(doc_id + "-profile.json");
    ensure_parent_dir(out);
    {
        std::ofstream profile_out(out, std::ios::trunc);
        if (!profile_out) {
            throw IoError("cannot write " + out);
        }
        profile_out << document_profile_to_json(profile).dump(2) << '\n';
    }
    emit_manifest(state, "score", {doc_path}, {out},
                  out + ".manifest.json", {{"checkpoint", ckpt_dir}, {"tau", tau}});

    std::cout << "document " << doc_id << ": " << profile.n_sentences << " sentences, "
              << profile.n_confident << " confident at tau " << tau << "\n";
    for (const auto& [label, freq] : profile.tactic_frequencies) {
        std::cout << "  " << label_display_name(label) << ": " << freq << "\n";
    }
    std::cout << "profile: " << out << "\n";
    return 0;
}

int run_report(CliState& state, const std::string& metrics_path) {
    std::ifstream in(metrics_path);
    if (!in) {
        throw IoError("cannot open " + metrics_path);
    }
    nlohmann::ordered_json object;
    try {
        in >> object;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("metrics file " + metrics_path + " is not valid JSON: " +
                         e.what());
    }

    MetricsReport report;
    try {
        report.n = object.at("n").get<std::int64_t>();
        report.accuracy = object.at("accuracy").get<double>();
        for (const auto& row : object.at("per_class")) {
            ClassMetrics m;
            m.label = parse_label(row.at("label").get<std::string>());
            m.precision = row.at("precision").get<double>();
            m.recall = row.at("recall").get<double>();
            m.f1 = row.at("f1").get<double>();
            m.support = row.at("support").get<std::int64_t>();
            m.undefined_precision = row.value("undefined_precision", false);
            report.per_class.push_back(m);
        }
        report.macro.precision = object.at("macro").at("precision").get<double>();
        report.macro.recall = object.at("macro").at("recall").get<double>();
        report.macro.f1 = object.at("macro").at("f1").get<double>();
        report.weighted.precision = object.at("weighted").at("precision").get<double>();
        report.weighted.recall = object.at("weighted").at("recall").get<double>();
        report.weighted.f1 = object.at("weighted").at("f1").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("metrics file " + metrics_path +
                          " does not match the report schema: " + e.what());
    }

    emit_manifest(state, "report", {metrics_path}, {},
                  state.out_path("report-manifest.json"), {});
    std::cout << format_metrics_report(report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Charismatic leadership tactic pipeline"};
    app.require_subcommand(1);
    app.fallthrough();

    CliState state;
    app.add_option("--config", state.config_path, "Pipeline config file (JSON)");
    app.add_option("--output-dir", state.output_dir_flag,
                   "Directory for outputs (overrides the config)");

    auto* generate_cmd =
        app.add_subcommand("generate", "Generate labeled sentences for one tactic");
    std::string tactic;
    int count = 0;
    std::string gen_out;
    generate_cmd->add_option("--tactic", tactic, "Tactic label name")->required();
    generate_cmd->add_option("--count", count, "Curated sentences to produce")
        ->required()
        ->check(CLI::PositiveNumber);
    generate_cmd->add_option("--out", gen_out, "Output corpus path");
    std::string endpoint_flag, model_flag, key_env_flag;
    int max_batch_flag = 0;
    generate_cmd->add_option("--endpoint", endpoint_flag, "Chat completion endpoint");
    generate_cmd->add_option("--model", model_flag, "Model name");
    generate_cmd->add_option("--api-key-env", key_env_flag,
                             "Environment variable holding the API key");
    generate_cmd->add_option("--max-batch", max_batch_flag,
                             "Max sentences per request")
        ->check(CLI::PositiveNumber);

    auto* ingest_cmd =
        app.add_subcommand("ingest-vuamc", "Ingest metaphor sentences from TEI XML");
    std::string xml_path, ingest_out;
    ingest_cmd->add_option("path", xml_path, "VUAMC XML file")->required();
    ingest_cmd->add_option("--out", ingest_out, "Output corpus path");

    auto* curate_cmd = app.add_subcommand("curate", "Deduplicate and filter a corpus");
    std::string curate_in, curate_out;
    bool review = false;
    curate_cmd->add_option("in", curate_in, "Input corpus")->required();
    curate_cmd->add_option("out", curate_out, "Output corpus")->required();
    curate_cmd->add_flag("--review", review, "Also write rejected sentences");

    auto* split_cmd = app.add_subcommand("split", "Split a corpus into train/val/test");
    std::string split_in;
    std::uint64_t seed_flag = 0;
    bool no_stratify = false;
    double test_fraction_flag = -1.0, val_fraction_flag = -1.0;
    split_cmd->add_option("in", split_in, "Input corpus")->required();
    auto* seed_opt = split_cmd->add_option("--seed", seed_flag, "Shuffle seed");
    split_cmd->add_flag("--no-stratify", no_stratify, "Disable per-class stratification");
    split_cmd->add_option("--test-fraction", test_fraction_flag, "Test fraction");
    split_cmd->add_option("--val-fraction", val_fraction_flag,
                          "Validation fraction of the training pool");

    auto* train_cmd = app.add_subcommand("train", "Fine-tune the classifier");
    std::string train_in, val_in, train_out;
    train_cmd->add_option("--train", train_in, "Training corpus");
    train_cmd->add_option("--val", val_in, "Validation corpus");
    train_cmd->add_option("--out", train_out, "Directory for checkpoints");
    std::uint64_t train_seed_flag = 0;
    int epochs_flag = 0;
    double lr_flag = 0.0;
    std::string encoder_flag;
    auto* train_seed_opt = train_cmd->add_option("--seed", train_seed_flag, "Training seed");
    auto* epochs_opt = train_cmd->add_option("--epochs", epochs_flag, "Training epochs");
    auto* lr_opt = train_cmd->add_option("--learning-rate", lr_flag, "Learning rate");
    auto* encoder_opt =
        train_cmd->add_option("--encoder", encoder_flag, "Encoder preset name");

    auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a checkpoint on a test set");
    std::string eval_ckpt, eval_test;
    eval_cmd->add_option("ckpt", eval_ckpt, "Checkpoint directory")->required();
    eval_cmd->add_option("test", eval_test, "Test corpus")->required();

    auto* score_cmd = app.add_subcommand("score", "Score a raw document");
    std::string score_ckpt, score_doc;
    double tau_flag = 0.5;
    score_cmd->add_option("ckpt", score_ckpt, "Checkpoint directory")->required();
    score_cmd->add_option("doc", score_doc, "UTF-8 text document")->required();
    auto* tau_opt = score_cmd->add_option("--tau", tau_flag, "Confidence threshold");

    auto* report_cmd = app.add_subcommand("report", "Pretty-print a metrics report");
    std::string report_metrics;
    report_cmd->add_option("metrics", report_metrics, "MetricsReport JSON file")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
            e.get_name() == "CallForVersion") {
            return app.exit(e);
        }
        app.exit(e);
        return 2;
    }

    try {
        state.finalize();
        if (*generate_cmd) {
            if (!endpoint_flag.empty()) {
                state.config.client.endpoint = endpoint_flag;
            }
            if (!model_flag.empty()) {
                state.config.client.model_name = model_flag;
            }
            if (!key_env_flag.empty()) {
                state.config.client.api_key_env = key_env_flag;
            }
            if (max_batch_flag > 0) {
                state.config.client.max_batch = max_batch_flag;
            }
            return run_generate(state, tactic, count, gen_out);
        }
        if (*ingest_cmd) {
            return run_ingest(state, xml_path, ingest_out);
        }
        if (*curate_cmd) {
            return run_curate(state, curate_in, curate_out, review);
        }
        if (*split_cmd) {
            if (seed_opt->count() > 0) {
                state.config.split.seed = seed_flag;
            }
            if (no_stratify) {
                state.config.split.stratified = false;
            }
            if (test_fraction_flag >= 0.0) {
                state.config.split.test_fraction = test_fraction_flag;
            }
            if (val_fraction_flag >= 0.0) {
                state.config.split.val_fraction_of_train = val_fraction_flag;
            }
            return run_split(state, split_in);
        }
        if (*train_cmd) {
            if (train_seed_opt->count() > 0) {
                state.config.training.seed = train_seed_flag;
            }
            if (epochs_opt->count() > 0) {
                state.config.training.epochs = epochs_flag;
            }
            if (lr_opt->count() > 0) {
                state.config.training.learning_rate = lr_flag;
            }
            if (encoder_opt->count() > 0) {
                state.config.training.encoder_name = encoder_flag;
            }
            return run_train(state, train_in, val_in, train_out);
        }
        if (*eval_cmd) {
            return run_evaluate(state, eval_ckpt, eval_test);
        }
        if (*score_cmd) {
            return run_score(state, score_ckpt, score_doc, tau_flag,
                             tau_opt->count() > 0);
        }
        if (*report_cmd) {
            return run_report(state, report_metrics);
        }
    } catch (const CharismaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
