#pragma once

#include <string>
#include <vector>

#include "charisma/labels.hpp"

namespace charisma {

// Prompt for one tactic. `instruction` must contain the {count} placeholder
// exactly once; few-shot examples are rendered as a numbered list.
struct PromptTemplate {
    CLTLabel tactic = CLTLabel::ambitious_goals;
    std::string instruction;
    std::vector<std::string> few_shot_examples;
    std::string style_constraints;
};

/// Throws ArgumentError when the template breaks its invariants.
void validate_template(const PromptTemplate& tmpl);

/// Built-in template for a tactic. The shipped texts are final-form;
/// callers may substitute their own refined wording.
PromptTemplate default_prompt_template(CLTLabel tactic);

/// Substitutes count, appends style constraints and the numbered examples.
std::string render_prompt(const PromptTemplate& tmpl, int count);

// Turns a raw model response into sentence texts: splits lines, strips
// leading enumeration markers ("1.", "2)", "(3)", "4 -") and surrounding
// quotes, drops empties. Lines that never had a marker are kept verbatim
// after quote stripping.
std::vector<std::string> parse_generation_output(const std::string& raw);

}  // namespace charisma
