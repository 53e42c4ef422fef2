#include "charisma/generation.hpp"

#include <cctype>
#include <unordered_set>

#include "charisma/digest.hpp"
#include "charisma/text_norm.hpp"

namespace charisma {

namespace {

// Consecutive batches allowed to add no new kept sentence before the job
// gives up (duplicate-saturated or degenerate model output).
constexpr int kStallLimit = 5;

bool looks_like_numbering_artifact(const std::string& text) {
    // Leading enumeration marker that parsing should have removed, or a
    // bare number standing alone.
    std::size_t i = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        ++i;
    }
    if (i == 0) {
        return false;
    }
    if (i == text.size()) {
        return true;  // the whole "sentence" is a number
    }
    return text[i] == '.' || text[i] == ')' || text[i] == ':';
}

}  // namespace

std::string_view reject_reason_name(RejectReason reason) {
    switch (reason) {
        case RejectReason::empty: return "empty";
        case RejectReason::numbering_artifact: return "numbering_artifact";
        case RejectReason::too_short: return "too_short";
        case RejectReason::too_long: return "too_long";
        case RejectReason::exact_duplicate: return "exact_duplicate";
        case RejectReason::near_duplicate: return "near_duplicate";
    }
    return "unknown";
}

CurationReport::CurationReport() {
    for (auto reason : {RejectReason::empty, RejectReason::numbering_artifact,
                        RejectReason::too_short, RejectReason::too_long,
                        RejectReason::exact_duplicate, RejectReason::near_duplicate}) {
        reasons[reason] = 0;
    }
}

std::pair<std::vector<LabeledSentence>, CurationReport> curate(
    const std::vector<LabeledSentence>& sentences,
    std::vector<RejectedSentence>* rejects) {
    std::vector<LabeledSentence> kept;
    CurationReport report;
    std::unordered_set<std::string> seen_normalized;
    std::vector<std::unordered_set<std::string>> kept_token_sets;

    const LabeledSentence* current = nullptr;
    auto reject = [&](RejectReason reason) {
        ++report.rejected;
        ++report.reasons[reason];
        if (rejects != nullptr) {
            rejects->push_back({*current, reason});
        }
    };

    for (const auto& sentence : sentences) {
        current = &sentence;
        std::string normalized = normalize_for_dedup(sentence.text);
        if (normalized.empty()) {
            reject(RejectReason::empty);
            continue;
        }
        if (looks_like_numbering_artifact(collapse_whitespace(sentence.text))) {
            reject(RejectReason::numbering_artifact);
            continue;
        }
        auto tokens = normalized_tokens(sentence.text);
        if (tokens.size() < kMinTokens) {
            reject(RejectReason::too_short);
            continue;
        }
        if (tokens.size() > kMaxTokens) {
            reject(RejectReason::too_long);
            continue;
        }
        if (seen_normalized.count(normalized) > 0) {
            reject(RejectReason::exact_duplicate);
            continue;
        }
        std::unordered_set<std::string> token_set(tokens.begin(), tokens.end());
        bool near = false;
        for (const auto& prior : kept_token_sets) {
            if (token_jaccard(token_set, prior) >= kNearDuplicateJaccard) {
                near = true;
                break;
            }
        }
        if (near) {
            reject(RejectReason::near_duplicate);
            continue;
        }
        seen_normalized.insert(std::move(normalized));
        kept_token_sets.push_back(std::move(token_set));
        kept.push_back(sentence);
        ++report.kept;
    }
    return {std::move(kept), std::move(report)};
}

std::vector<LabeledSentence> generate_batch(LlmClient& client, const LLMClientConfig& config,
                                            const PromptTemplate& tmpl, int n,
                                            BatchRecord* record) {
    validate_client_config(config);
    if (n < 1) {
        throw ArgumentError("batch size must be >= 1");
    }
    if (n > config.max_batch) {
        throw ArgumentError("batch size " + std::to_string(n) + " exceeds max_batch " +
                            std::to_string(config.max_batch));
    }
    const std::string prompt = render_prompt(tmpl, n);
    const std::string prompt_id =
        std::string(label_name(tmpl.tactic)) + "-" + fnv1a64_hex(prompt);

    CompletionResult result = client.complete(prompt);
    auto texts = parse_generation_output(result.content);

    std::vector<LabeledSentence> sentences;
    sentences.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        LabeledSentence s;
        s.id = make_sentence_id();
        s.text = texts[i];
        s.label = tmpl.tactic;
        s.source = SentenceSource::generated;
        s.meta["prompt_id"] = prompt_id;
        s.meta["batch_index"] = i;
        s.meta["model_name"] = config.model_name;
        sentences.push_back(std::move(s));
    }
    if (record != nullptr) {
        record->raw_response = result.content;
        record->parse_count = texts.size();
        record->attempts = result.attempts;
    }
    return sentences;
}

std::pair<Corpus, CurationReport> run_job(LlmClient& client, const LLMClientConfig& config,
                                          GenerationJob& job) {
    if (job.status != JobStatus::pending) {
        throw ArgumentError("job is not pending");
    }
    if (job.target_count < 1) {
        throw ArgumentError("target_count must be >= 1");
    }
    validate_template(job.tmpl);
    job.status = JobStatus::running;

    std::vector<LabeledSentence> raw;
    std::size_t kept_count = 0;
    int stalled = 0;
    int batch_serial = 0;

    auto finalize = [&raw, &job]() {
        auto [kept, report] = curate(raw);
        // A duplicate-heavy final batch can overshoot; the job yields
        // exactly target_count sentences.
        if (kept.size() > static_cast<std::size_t>(job.target_count)) {
            kept.resize(static_cast<std::size_t>(job.target_count));
            report.kept = kept.size();
        }
        Corpus corpus;
        corpus.sentences = std::move(kept);
        return std::make_pair(std::move(corpus), std::move(report));
    };

    while (kept_count < static_cast<std::size_t>(job.target_count)) {
        int needed = job.target_count - static_cast<int>(kept_count);
        int n = std::min(needed, config.max_batch);
        BatchRecord record;
        record.request_id = "batch-" + std::to_string(++batch_serial);
        std::vector<LabeledSentence> batch;
        try {
            batch = generate_batch(client, config, job.tmpl, n, &record);
        } catch (const GenerationError& e) {
            job.batches.push_back(std::move(record));
            job.status = JobStatus::failed;
            auto [corpus, report] = finalize();
            throw PartialResultError("generation failed with " +
                                         std::to_string(report.kept) + "/" +
                                         std::to_string(job.target_count) +
                                         " sentences kept: " + e.what(),
                                     std::move(corpus), std::move(report));
        }
        job.produced += record.parse_count;
        job.batches.push_back(std::move(record));
        raw.insert(raw.end(), batch.begin(), batch.end());

        auto [kept, report] = curate(raw);
        if (report.kept > kept_count) {
            stalled = 0;
        } else if (++stalled >= kStallLimit) {
            job.status = JobStatus::failed;
            Corpus corpus;
            corpus.sentences = std::move(kept);
            throw PartialResultError(
                "generation stalled at " + std::to_string(report.kept) + "/" +
                    std::to_string(job.target_count) + " sentences after " +
                    std::to_string(job.batches.size()) + " batches",
                std::move(corpus), std::move(report));
        }
        kept_count = report.kept;
    }

    auto [corpus, report] = finalize();
    job.status = JobStatus::done;
    return {std::move(corpus), std::move(report)};
}

std::pair<Corpus, CurationReport> run_job(const LLMClientConfig& config, GenerationJob& job) {
    auto client = make_llm_client(config);
    return run_job(*client, config, job);
}

}  // namespace charisma
