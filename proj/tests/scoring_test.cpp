#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "charisma/errors.hpp"
#include "charisma/scoring.hpp"
#include "test_corpus.hpp"

using namespace charisma;

namespace {

Checkpoint untrained_checkpoint() {
    Corpus corpus = testsupport::synthetic_corpus(5, 13);
    Checkpoint ckpt;
    ckpt.vocab_lines = testsupport::build_vocab_lines(corpus);
    ckpt.spec = encoder_preset("tiny-uncased");
    ckpt.spec.vocab_size = static_cast<int>(ckpt.vocab_lines.size());
    ckpt.params = init_parameters<float>(ckpt.spec, 3);
    ckpt.encoding.max_length = 32;
    const auto labels = all_labels();
    ckpt.label_order.assign(labels.begin(), labels.end());
    return ckpt;
}

}  // namespace

TEST_CASE("segment splits on terminal punctuation") {
    auto parts = segment("First sentence. Second one! A third?");
    REQUIRE(parts.size() == 3);
    CHECK(parts[0] == "First sentence.");
    CHECK(parts[1] == "Second one!");
    CHECK(parts[2] == "A third?");
}

TEST_CASE("segment keeps abbreviations together") {
    auto parts = segment("Dr. Smith arrived late. He sat down.");
    REQUIRE(parts.size() == 2);
    CHECK(parts[0] == "Dr. Smith arrived late.");

    parts = segment("The U.S. economy grew. Markets cheered.");
    REQUIRE(parts.size() == 2);
    CHECK(parts[0] == "The U.S. economy grew.");

    parts = segment("A. Lincoln spoke first. Then B. Douglas answered.");
    REQUIRE(parts.size() == 2);

    parts = segment("Bring pens, paper, etc. and sit down. Class starts now.");
    REQUIRE(parts.size() == 2);
    CHECK(parts[1] == "Class starts now.");
}

TEST_CASE("segment ignores decimal points") {
    auto parts = segment("The rate fell 3.5 percent. Analysts shrugged.");
    REQUIRE(parts.size() == 2);
    CHECK(parts[0] == "The rate fell 3.5 percent.");
}

TEST_CASE("segment swallows trailing quotes and closers") {
    auto parts = segment("He said \"Stop.\" Then he left.");
    REQUIRE(parts.size() == 2);
    CHECK(parts[0] == "He said \"Stop.\"");
    CHECK(parts[1] == "Then he left.");

    parts = segment("Wait... what happened?");
    REQUIRE(parts.size() == 2);
    CHECK(parts[0] == "Wait...");
    CHECK(parts[1] == "what happened?");
}

TEST_CASE("segment handles empty and unterminated input") {
    CHECK(segment("").empty());
    CHECK(segment("  \n\t ").empty());
    auto parts = segment("no closing punctuation here");
    REQUIRE(parts.size() == 1);
    CHECK(parts[0] == "no closing punctuation here");
    // messy whitespace collapses inside each sentence
    parts = segment("  spaced   out.   next\none. ");
    REQUIRE(parts.size() == 2);
    CHECK(parts[0] == "spaced out.");
    CHECK(parts[1] == "next one.");
}

TEST_CASE("score_document validates the threshold") {
    auto ckpt = untrained_checkpoint();
    CHECK_THROWS_AS(score_document(ckpt, "d", "Text here.", -0.1), ArgumentError);
    CHECK_THROWS_AS(score_document(ckpt, "d", "Text here.", 1.5), ArgumentError);
    CHECK_THROWS_AS(score_document(ckpt, "d", "Text here.",
                                   std::nan("")), ArgumentError);
    CHECK_NOTHROW(score_document(ckpt, "d", "Text here.", 0.0));
    CHECK_NOTHROW(score_document(ckpt, "d", "Text here.", 1.0));
}

TEST_CASE("empty documents produce an empty profile") {
    auto ckpt = untrained_checkpoint();
    auto profile = score_document(ckpt, "empty-doc", "   ", 0.5);
    CHECK(profile.document_id == "empty-doc");
    CHECK(profile.n_sentences == 0);
    CHECK(profile.n_confident == 0);
    CHECK(profile.sentence_results.empty());
    CHECK(profile.tactic_frequencies.empty());
}

TEST_CASE("profile frequencies cover confident sentences only") {
    auto ckpt = untrained_checkpoint();
    const std::string doc =
        "Together we tend the garden that belongs to us all. "
        "Why would the harbor wait for another voyage? "
        "We choose the summit, not the quarry.";

    // An untrained model sits near the uniform distribution, so a lax
    // threshold accepts everything and a strict one accepts nothing.
    auto lax = score_document(ckpt, "doc", doc, 0.05);
    CHECK(lax.n_sentences == 3);
    CHECK(lax.n_confident == 3);
    double sum = 0.0;
    for (const auto& [label, freq] : lax.tactic_frequencies) {
        (void)label;
        CHECK(freq > 0.0);
        sum += freq;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

    auto strict = score_document(ckpt, "doc", doc, 0.99);
    CHECK(strict.n_sentences == 3);
    CHECK(strict.n_confident == 0);
    CHECK(strict.tactic_frequencies.empty());
    for (const auto& r : strict.sentence_results) {
        CHECK(!r.confident);
    }
}

TEST_CASE("profile json shape") {
    auto ckpt = untrained_checkpoint();
    auto profile = score_document(ckpt, "speech-1",
                                  "We will reach the horizon within a decade. "
                                  "Who among us questions the bright summit?",
                                  0.05);
    auto object = document_profile_to_json(profile);
    CHECK(object.at("document_id") == "speech-1");
    CHECK(object.at("confidence_threshold") == 0.05);
    CHECK(object.at("n_sentences") == 2);
    CHECK(object.at("n_confident") == 2);
    CHECK(object.at("tactic_frequencies").is_object());
    REQUIRE(object.at("sentences").size() == 2);
    const auto& first = object.at("sentences").at(0);
    CHECK(first.at("text").get<std::string>().find("horizon") != std::string::npos);
    CHECK(first.at("confident") == true);
    CHECK(first.at("probabilities").size() == 9);
    double total = 0.0;
    for (const auto& p : first.at("probabilities")) {
        total += p.get<double>();
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(first.contains("label"));
}

TEST_CASE("scoring is deterministic") {
    auto ckpt = untrained_checkpoint();
    const std::string doc = "Our shared ledger binds every village here. Why not?";
    auto a = score_document(ckpt, "doc", doc, 0.1);
    auto b = score_document(ckpt, "doc", doc, 0.1);
    REQUIRE(a.sentence_results.size() == b.sentence_results.size());
    for (std::size_t i = 0; i < a.sentence_results.size(); ++i) {
        CHECK(a.sentence_results[i].prediction.label ==
              b.sentence_results[i].prediction.label);
        CHECK((a.sentence_results[i].prediction.logits -
               b.sentence_results[i].prediction.logits)
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
    }
}
