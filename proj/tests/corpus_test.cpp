#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "charisma/corpus.hpp"
#include "charisma/digest.hpp"
#include "charisma/errors.hpp"
#include "charisma/text_norm.hpp"
#include "test_corpus.hpp"

using namespace charisma;
namespace fs = std::filesystem;

TEST_CASE("label order matches head indices") {
    const auto labels = all_labels();
    REQUIRE(labels.size() == 9);
    CHECK(label_index(CLTLabel::metaphor_simile) == 0);
    CHECK(label_index(CLTLabel::lists_repetitions) == 4);
    CHECK(label_index(CLTLabel::confidence_in_goals) == 8);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        CHECK(label_from_index(static_cast<int>(i)) == labels[i]);
    }
    CHECK_THROWS_AS(label_from_index(9), ArgumentError);
    CHECK_THROWS_AS(label_from_index(-1), ArgumentError);
}

TEST_CASE("label names round-trip and reject unknowns") {
    for (CLTLabel label : all_labels()) {
        CHECK(parse_label(label_name(label)) == label);
    }
    CHECK(label_name(CLTLabel::sentiment_of_the_collective) ==
          "sentiment_of_the_collective");
    CHECK_THROWS_AS(parse_label("sarcasm"), SchemaError);
    CHECK_THROWS_AS(parse_label(""), SchemaError);
}

TEST_CASE("display names") {
    CHECK(label_display_name(CLTLabel::metaphor_simile) == "Metaphor/Simile");
    CHECK(label_display_name(CLTLabel::rhetorical_question) == "Rhetorical question");
    CHECK(label_display_name(CLTLabel::story_anecdote) == "Story/Anecdote");
    CHECK(label_display_name(CLTLabel::contrast) == "Contrast");
    CHECK(label_display_name(CLTLabel::lists_repetitions) == "Lists/Repetitions");
    CHECK(label_display_name(CLTLabel::sentiment_of_the_collective) ==
          "Sentiment of the collective");
    CHECK(label_display_name(CLTLabel::moral_conviction) == "Moral conviction");
    CHECK(label_display_name(CLTLabel::ambitious_goals) == "Ambitious goals");
    CHECK(label_display_name(CLTLabel::confidence_in_goals) == "Confidence in goals");
}

TEST_CASE("frame and substance components") {
    CHECK(label_component(CLTLabel::metaphor_simile) == CLTComponent::frame);
    CHECK(label_component(CLTLabel::lists_repetitions) == CLTComponent::frame);
    CHECK(label_component(CLTLabel::sentiment_of_the_collective) ==
          CLTComponent::substance);
    CHECK(label_component(CLTLabel::confidence_in_goals) == CLTComponent::substance);
    int frame = 0;
    for (CLTLabel label : all_labels()) {
        if (label_component(label) == CLTComponent::frame) {
            ++frame;
        }
    }
    CHECK(frame == 5);
}

TEST_CASE("collapse_whitespace") {
    CHECK(collapse_whitespace("  a \t b\n\nc  ") == "a b c");
    CHECK(collapse_whitespace("") == "");
    CHECK(collapse_whitespace(" \n\t ") == "");
    CHECK(collapse_whitespace("already clean") == "already clean");
}

TEST_CASE("normalize_for_dedup ignores case and punctuation") {
    CHECK(normalize_for_dedup("We will win!") == normalize_for_dedup("we will win"));
    CHECK(normalize_for_dedup("A, b; c.") == "a b c");
    CHECK(normalize_for_dedup("Distinct one") != normalize_for_dedup("Distinct two"));
}

TEST_CASE("token_jaccard hand values") {
    auto a = normalized_tokens("the quick brown fox");
    auto b = normalized_tokens("the quick red fox");
    // |{the,quick,fox}| / |{the,quick,brown,red,fox}|
    CHECK(token_jaccard(a, b) == doctest::Approx(3.0 / 5.0));
    CHECK(token_jaccard(a, a) == doctest::Approx(1.0));
    CHECK(token_jaccard(a, normalized_tokens("entirely different words")) ==
          doctest::Approx(0.0));
    CHECK(token_jaccard(normalized_tokens(""), normalized_tokens("")) ==
          doctest::Approx(1.0));
}

TEST_CASE("fnv1a64 known vectors") {
    // Reference values for the 64-bit FNV-1a offset basis and prime.
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
    CHECK(fnv1a64_hex("") == "cbf29ce484222325");
}

TEST_CASE("sentence ids are unique and reseedable") {
    seed_sentence_ids(7);
    const std::string a = make_sentence_id();
    const std::string b = make_sentence_id();
    CHECK(a != b);
    CHECK(a.rfind("s-", 0) == 0);
    CHECK(a.size() == 2 + 32);
    seed_sentence_ids(7);
    CHECK(make_sentence_id() == a);
    CHECK(make_sentence_id() == b);
    seed_sentence_ids(8);
    CHECK(make_sentence_id() != a);
}

TEST_CASE("validate_sentence enforces invariants") {
    LabeledSentence s;
    s.id = "x";
    s.text = "A fine sentence.";
    s.label = CLTLabel::contrast;
    CHECK_NOTHROW(validate_sentence(s));

    LabeledSentence blank = s;
    blank.text = "   \t ";
    CHECK_THROWS_AS(validate_sentence(blank), IntegrityError);

    LabeledSentence wrong = s;
    wrong.source = SentenceSource::vuamc;
    CHECK_THROWS_AS(validate_sentence(wrong), IntegrityError);
    wrong.label = CLTLabel::metaphor_simile;
    CHECK_NOTHROW(validate_sentence(wrong));
}

TEST_CASE("sentence json keeps unknown meta keys") {
    LabeledSentence s;
    s.id = "id-1";
    s.text = "Some text.";
    s.label = CLTLabel::moral_conviction;
    s.source = SentenceSource::generated;
    s.meta["prompt_id"] = "p-1";
    s.meta["custom_flag"] = true;
    s.meta["nested"] = {{"k", 3}};

    auto object = sentence_to_json(s);
    CHECK(object.begin().key() == "id");
    auto back = sentence_from_json(object);
    CHECK(back == s);
    CHECK(back.meta.at("custom_flag") == true);
    CHECK(back.meta.at("nested").at("k") == 3);
}

TEST_CASE("sentence json rejects missing and malformed fields") {
    auto object = sentence_to_json([] {
        LabeledSentence s;
        s.id = "id-1";
        s.text = "Some text.";
        return s;
    }());
    auto broken = object;
    broken.erase("text");
    CHECK_THROWS_AS(sentence_from_json(broken), SchemaError);
    broken = object;
    broken["label"] = "not_a_tactic";
    CHECK_THROWS_AS(sentence_from_json(broken), SchemaError);
    broken = object;
    broken["source"] = "carved";
    CHECK_THROWS_AS(sentence_from_json(broken), SchemaError);
}

TEST_CASE("corpus save and load round trip") {
    const std::string dir = testsupport::make_temp_dir("corpus-rt");
    const std::string path = dir + "/c.jsonl";

    Corpus corpus = testsupport::synthetic_corpus(4, 11);
    save_corpus(corpus, path);
    Corpus loaded = load_corpus(path);
    CHECK(loaded == corpus);

    // Saving the loaded corpus again is byte identical.
    const std::string path2 = dir + "/c2.jsonl";
    save_corpus(loaded, path2);
    CHECK(file_digest(path) == file_digest(path2));

    fs::remove_all(dir);
}

TEST_CASE("corpus load rejects duplicate ids and bad lines") {
    const std::string dir = testsupport::make_temp_dir("corpus-bad");
    const std::string path = dir + "/c.jsonl";
    {
        std::ofstream out(path);
        out << R"({"id":"a","text":"One sentence.","label":"contrast","source":"generated","meta":{}})"
            << "\n";
        out << R"({"id":"a","text":"Other sentence.","label":"contrast","source":"generated","meta":{}})"
            << "\n";
    }
    CHECK_THROWS_AS(load_corpus(path), IntegrityError);
    {
        std::ofstream out(path, std::ios::trunc);
        out << "{not json\n";
    }
    CHECK_THROWS_AS(load_corpus(path), ParseError);
    CHECK_THROWS_AS(load_corpus(dir + "/absent.jsonl"), IoError);
    fs::remove_all(dir);
}

TEST_CASE("corpus_stats") {
    Corpus corpus;
    auto add = [&](const char* id, const char* text, CLTLabel label) {
        LabeledSentence s;
        s.id = id;
        s.text = text;
        s.label = label;
        corpus.sentences.push_back(s);
    };
    add("a", "abcd", CLTLabel::contrast);        // 4 chars
    add("b", "abcdefgh", CLTLabel::contrast);    // 8 chars
    add("c", "abcdef", CLTLabel::moral_conviction);  // 6 chars

    auto stats = corpus_stats(corpus);
    CHECK(stats.total == 3);
    CHECK(stats.per_label.at(CLTLabel::contrast) == 2);
    CHECK(stats.per_label.at(CLTLabel::moral_conviction) == 1);
    CHECK(stats.per_label.at(CLTLabel::metaphor_simile) == 0);
    CHECK(stats.per_label.size() == 9);
    CHECK(stats.min_chars == 4);
    CHECK(stats.max_chars == 8);
    CHECK(stats.mean_chars == doctest::Approx(6.0));
}

TEST_CASE("synthetic corpus families stay lexically distinct") {
    Corpus corpus = testsupport::synthetic_corpus(30, 3);
    CHECK(corpus.size() == 9 * 30);
    std::set<std::string> texts;
    for (const auto& s : corpus.sentences) {
        texts.insert(normalize_for_dedup(s.text));
        CHECK_NOTHROW(validate_sentence(s));
    }
    CHECK(texts.size() == corpus.size());

    // Regenerating with the same seed reproduces the corpus.
    Corpus again = testsupport::synthetic_corpus(30, 3);
    CHECK(again == corpus);
}
