#include "charisma/labels.hpp"

#include <string>

#include "charisma/errors.hpp"

namespace charisma {

namespace {

struct LabelInfo {
    std::string_view name;
    std::string_view display;
    CLTComponent component;
};

constexpr std::array<LabelInfo, kNumLabels> kLabelTable = {{
    {"metaphor_simile", "Metaphor/Simile", CLTComponent::frame},
    {"rhetorical_question", "Rhetorical question", CLTComponent::frame},
    {"story_anecdote", "Story/Anecdote", CLTComponent::frame},
    {"contrast", "Contrast", CLTComponent::frame},
    {"lists_repetitions", "Lists/Repetitions", CLTComponent::frame},
    {"sentiment_of_the_collective", "Sentiment of the collective", CLTComponent::substance},
    {"moral_conviction", "Moral conviction", CLTComponent::substance},
    {"ambitious_goals", "Ambitious goals", CLTComponent::substance},
    {"confidence_in_goals", "Confidence in goals", CLTComponent::substance},
}};

}  // namespace

std::string_view label_name(CLTLabel label) {
    return kLabelTable[static_cast<std::size_t>(label)].name;
}

std::string_view label_display_name(CLTLabel label) {
    return kLabelTable[static_cast<std::size_t>(label)].display;
}

CLTComponent label_component(CLTLabel label) {
    return kLabelTable[static_cast<std::size_t>(label)].component;
}

CLTLabel parse_label(std::string_view name) {
    for (std::size_t i = 0; i < kLabelTable.size(); ++i) {
        if (kLabelTable[i].name == name) {
            return static_cast<CLTLabel>(i);
        }
    }
    throw SchemaError("unknown label string: \"" + std::string(name) + "\"");
}

CLTLabel label_from_index(int index) {
    if (index < 0 || index >= static_cast<int>(kNumLabels)) {
        throw ArgumentError("label index out of range: " + std::to_string(index));
    }
    return static_cast<CLTLabel>(index);
}

}  // namespace charisma
