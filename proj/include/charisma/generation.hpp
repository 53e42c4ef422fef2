#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "charisma/corpus.hpp"
#include "charisma/errors.hpp"
#include "charisma/llm_client.hpp"
#include "charisma/prompts.hpp"

namespace charisma {

enum class RejectReason {
    empty,
    numbering_artifact,
    too_short,
    too_long,
    exact_duplicate,
    near_duplicate,
};

std::string_view reject_reason_name(RejectReason reason);

struct CurationReport {
    std::size_t kept = 0;
    std::size_t rejected = 0;
    std::map<RejectReason, std::size_t> reasons;  // all six reasons present

    CurationReport();
};

// Near-duplicate threshold on normalized-token Jaccard similarity.
inline constexpr double kNearDuplicateJaccard = 0.9;
inline constexpr std::size_t kMinTokens = 3;
inline constexpr std::size_t kMaxTokens = 128;

struct RejectedSentence {
    LabeledSentence sentence;
    RejectReason reason = RejectReason::empty;
};

// Filters a sentence list in order: drops empties, residual numbering
// artifacts, out-of-bounds lengths, exact duplicates (normalized text) and
// near duplicates (Jaccard >= 0.9 against an already kept sentence).
// First occurrence wins. Idempotent on its own output. When rejects is
// given the dropped sentences are appended to it for review.
std::pair<std::vector<LabeledSentence>, CurationReport> curate(
    const std::vector<LabeledSentence>& sentences,
    std::vector<RejectedSentence>* rejects = nullptr);

struct BatchRecord {
    std::string request_id;
    std::string raw_response;
    std::size_t parse_count = 0;
    int attempts = 1;
};

enum class JobStatus { pending, running, done, failed };

struct GenerationJob {
    PromptTemplate tmpl;
    int target_count = 0;
    std::size_t produced = 0;  // sum of per-batch parse counts
    std::vector<BatchRecord> batches;
    JobStatus status = JobStatus::pending;
};

// Thrown when a job cannot reach its target; carries whatever survived
// curation so callers can keep the partial corpus.
class PartialResultError : public GenerationError {
public:
    PartialResultError(const std::string& msg, Corpus partial, CurationReport report)
        : GenerationError(msg), partial_(std::move(partial)), report_(std::move(report)) {}

    const Corpus& partial() const { return partial_; }
    const CurationReport& report() const { return report_; }

private:
    Corpus partial_;
    CurationReport report_;
};

/// One batch: renders the prompt, calls the client, parses and labels.
/// n must not exceed config.max_batch.
std::vector<LabeledSentence> generate_batch(LlmClient& client, const LLMClientConfig& config,
                                            const PromptTemplate& tmpl, int n,
                                            BatchRecord* record = nullptr);

// Issues batches until the curated yield reaches job.target_count; the
// returned corpus holds exactly target_count sentences. Batches that stop
// contributing new sentences, or a client that keeps failing, end the job
// with a PartialResultError.
std::pair<Corpus, CurationReport> run_job(LlmClient& client, const LLMClientConfig& config,
                                          GenerationJob& job);

/// Convenience overload constructing the client from the config.
std::pair<Corpus, CurationReport> run_job(const LLMClientConfig& config, GenerationJob& job);

}  // namespace charisma
