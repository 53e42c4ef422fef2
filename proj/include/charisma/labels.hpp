#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace charisma {

// The nine verbal charismatic leadership tactics. Order is fixed: it defines
// the label indices used by the classifier head, the confusion matrix axes
// and every serialized label map.
enum class CLTLabel : int {
    metaphor_simile = 0,
    rhetorical_question,
    story_anecdote,
    contrast,
    lists_repetitions,
    sentiment_of_the_collective,
    moral_conviction,
    ambitious_goals,
    confidence_in_goals,
};

inline constexpr std::size_t kNumLabels = 9;

// frame = figure-of-speech tactics, substance = message-content tactics.
enum class CLTComponent { frame, substance };

constexpr std::array<CLTLabel, kNumLabels> all_labels() {
    return {CLTLabel::metaphor_simile,
            CLTLabel::rhetorical_question,
            CLTLabel::story_anecdote,
            CLTLabel::contrast,
            CLTLabel::lists_repetitions,
            CLTLabel::sentiment_of_the_collective,
            CLTLabel::moral_conviction,
            CLTLabel::ambitious_goals,
            CLTLabel::confidence_in_goals};
}

/// Canonical lowercase snake_case name, used in corpus files and reports.
std::string_view label_name(CLTLabel label);

/// Human-readable display name ("Metaphor/Simile", "Ambitious goals", ...).
std::string_view label_display_name(CLTLabel label);

CLTComponent label_component(CLTLabel label);

/// Inverse of label_name. Throws SchemaError on an unknown string.
CLTLabel parse_label(std::string_view name);

inline int label_index(CLTLabel label) { return static_cast<int>(label); }

/// Label for a head/confusion-matrix index. Throws ArgumentError if out of range.
CLTLabel label_from_index(int index);

}  // namespace charisma
