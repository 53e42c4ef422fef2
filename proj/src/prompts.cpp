#include "charisma/prompts.hpp"

#include <cctype>
#include <cstddef>

#include "charisma/errors.hpp"
#include "charisma/text_norm.hpp"

namespace charisma {

namespace {

constexpr const char* kCountPlaceholder = "{count}";

std::size_t count_placeholders(const std::string& text) {
    std::size_t n = 0;
    std::size_t pos = 0;
    while ((pos = text.find(kCountPlaceholder, pos)) != std::string::npos) {
        ++n;
        pos += 7;
    }
    return n;
}

inline bool is_quote_char(char c) { return c == '"' || c == '\''; }

// Strips one leading enumeration marker. Recognized forms: "1.", "2)",
// "(3)", "4:", "5 -" and a bare number directly followed by a quoted
// sentence. A number that is part of the sentence ("2005 was...",
// "3.5 percent...") is left alone.
bool strip_enumeration_marker(std::string& line) {
    std::size_t i = 0;
    bool parenthesized = false;
    if (i < line.size() && line[i] == '(') {
        parenthesized = true;
        ++i;
    }
    std::size_t digits_start = i;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) {
        ++i;
    }
    if (i == digits_start) {
        return false;
    }
    bool matched = false;
    if (parenthesized) {
        matched = i < line.size() && line[i] == ')';
        if (matched) {
            ++i;
        }
    } else if (i < line.size() && (line[i] == '.' || line[i] == ')' || line[i] == ':')) {
        char next = i + 1 < line.size() ? line[i + 1] : ' ';
        matched = next == ' ' || is_quote_char(next);
        if (matched) {
            ++i;
        }
    } else if (i + 1 < line.size() && line[i] == ' ' &&
               (is_quote_char(line[i + 1]) || line[i + 1] == '-')) {
        matched = true;
        if (line[i + 1] == '-') {
            ++i;  // consume the dash as part of the marker
            ++i;
        }
    }
    if (!matched) {
        return false;
    }
    while (i < line.size() && line[i] == ' ') {
        ++i;
    }
    line.erase(0, i);
    return true;
}

void strip_surrounding_quotes(std::string& line) {
    auto is_quote = [](char c) { return c == '"' || c == '\''; };
    while (line.size() >= 2 && is_quote(line.front()) && is_quote(line.back())) {
        line = line.substr(1, line.size() - 2);
    }
    // Unicode curly quotes as emitted by chat models.
    auto strip_pair = [&](const char* open, const char* close) {
        std::size_t olen = std::char_traits<char>::length(open);
        std::size_t clen = std::char_traits<char>::length(close);
        while (line.size() >= olen + clen && line.compare(0, olen, open) == 0 &&
               line.compare(line.size() - clen, clen, close) == 0) {
            line = line.substr(olen, line.size() - olen - clen);
        }
    };
    strip_pair("“", "”");
    strip_pair("‘", "’");
}

}  // namespace

void validate_template(const PromptTemplate& tmpl) {
    if (count_placeholders(tmpl.instruction) != 1) {
        throw ArgumentError("prompt instruction must contain exactly one {count} placeholder");
    }
    if (tmpl.few_shot_examples.empty()) {
        throw ArgumentError("prompt template needs at least one few-shot example");
    }
}

std::string render_prompt(const PromptTemplate& tmpl, int count) {
    if (count < 1) {
        throw ArgumentError("count must be >= 1, got " + std::to_string(count));
    }
    validate_template(tmpl);

    std::string body = tmpl.instruction;
    std::size_t pos = body.find(kCountPlaceholder);
    body.replace(pos, 7, std::to_string(count));

    std::string prompt = body;
    if (!tmpl.style_constraints.empty()) {
        prompt += " " + tmpl.style_constraints;
    }
    prompt += " Number each generated response. Here are some examples:";
    for (std::size_t i = 0; i < tmpl.few_shot_examples.size(); ++i) {
        prompt += " " + std::to_string(i + 1) + ". \"" + tmpl.few_shot_examples[i] + "\"";
    }
    return prompt;
}

std::vector<std::string> parse_generation_output(const std::string& raw) {
    std::vector<std::string> sentences;
    std::size_t start = 0;
    while (start <= raw.size()) {
        std::size_t end = raw.find('\n', start);
        if (end == std::string::npos) {
            end = raw.size();
        }
        std::string line = raw.substr(start, end - start);
        start = end + 1;
        if (end == raw.size() && line.empty()) {
            break;
        }
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        line = collapse_whitespace(line);
        if (line.empty()) {
            continue;
        }
        strip_enumeration_marker(line);
        strip_surrounding_quotes(line);
        line = collapse_whitespace(line);
        if (!line.empty()) {
            sentences.push_back(std::move(line));
        }
    }
    return sentences;
}

PromptTemplate default_prompt_template(CLTLabel tactic) {
    PromptTemplate tmpl;
    tmpl.tactic = tactic;
    tmpl.style_constraints =
        "Don't use highfalutin language, but phrase it the way it would be said in a normal "
        "presentation. Specifically, ensure significant variation in the opening of each "
        "sentence to maintain distinctiveness. Each sentence should be unique and notably "
        "different from the others.";

    switch (tactic) {
        case CLTLabel::ambitious_goals:
            tmpl.instruction =
                "Generate {count} individual sentences for the following: Generate sentences "
                "expressing explicit goal-setting for followers that is ambitious, often "
                "specific. Present each sentence as it would be spoken during a speech, with a "
                "focus on achieving maximum diversity.";
            tmpl.few_shot_examples = {
                "By 2005, all TVs we sell in Japan will be LCD model",
                "In 2025, I want every single product in our lineup to be made from fully "
                "sustainable materials.",
                "In the next seven years, we're going to lead the market, not just in sales, "
                "but in sustainability, inclusivity, and innovation.",
                "In five years, we'll cut our carbon emissions by 80%, paving the way for a "
                "cleaner, greener planet!",
                "Our goal for 2028 is to implement cutting-edge technology enabling remote "
                "work opportunities for all our employees worldwide!",
                "By the year 2030, we aim to have our software available and fully functional "
                "in 25 different languages, expanding our reach and inclusivity!"};
            break;
        case CLTLabel::metaphor_simile:
            tmpl.instruction =
                "Generate {count} individual sentences for the following: Generate sentences "
                "that convey a message through a vivid metaphor or simile, comparing the "
                "situation at hand to a concrete image. Present each sentence as it would be "
                "spoken during a speech, with a focus on achieving maximum diversity.";
            tmpl.few_shot_examples = {
                "This company is a ship, and every one of you is part of the crew.",
                "Our progress this year spread like wildfire through the whole industry.",
                "Competition is a storm, and we are the lighthouse that keeps shining.",
                "Building this team was like planting an orchard; now we harvest the fruit.",
                "The market is an ocean, and we have learned to read its tides.",
                "Ideas here travel like sparks across dry grass."};
            break;
        case CLTLabel::rhetorical_question:
            tmpl.instruction =
                "Generate {count} individual sentences for the following: Generate sentences "
                "that pose a rhetorical question to the audience, a question asked for effect "
                "rather than an answer. Present each sentence as it would be spoken during a "
                "speech, with a focus on achieving maximum diversity.";
            tmpl.few_shot_examples = {
                "How long are we willing to wait for the change we already know is needed?",
                "Who among us believes that standing still is an option?",
                "What kind of company do we want our children to inherit?",
                "Isn't it time we backed our words with action?",
                "If not us, then who will take this on?",
                "Do we really want to look back and say we played it safe?"};
            break;
        case CLTLabel::story_anecdote:
            tmpl.instruction =
                "Generate {count} individual sentences for the following: Generate sentences "
                "that open or carry a short story or personal anecdote illustrating a point. "
                "Present each sentence as it would be spoken during a speech, with a focus on "
                "achieving maximum diversity.";
            tmpl.few_shot_examples = {
                "When I started on the factory floor twenty years ago, my supervisor told me "
                "something I never forgot.",
                "Last month I met a customer in Ohio who had used our very first product.",
                "Years ago, a mentor handed me a broken prototype and said, fix the team "
                "first.",
                "On my first day here, I got lost in the warehouse and a stranger walked me "
                "to my desk.",
                "I remember the night our first order came in; we celebrated with cold pizza.",
                "A nurse once told me our software saved her an hour every shift, and that "
                "hour went to her patients."};
            break;
        case CLTLabel::contrast:
            tmpl.instruction =
                "Generate {count} individual sentences for the following: Generate sentences "
                "built on an explicit contrast, setting one option, time or group against "
                "another. Present each sentence as it would be spoken during a speech, with a "
                "focus on achieving maximum diversity.";
            tmpl.few_shot_examples = {
                "We are not here to follow the market; we are here to lead it.",
                "Yesterday we reacted to change; tomorrow we will create it.",
                "Others cut corners; we cut waiting times.",
                "It is not about working harder, it is about working smarter.",
                "Where they see risk, we see opportunity.",
                "Small steps got us here, but bold steps will take us forward."};
            break;
        case CLTLabel::lists_repetitions:
            tmpl.instruction =
                "Generate {count} individual sentences for the following: Generate sentences "
                "that use a list, especially a three-part list, or deliberate repetition of a "
                "phrase. Present each sentence as it would be spoken during a speech, with a "
                "focus on achieving maximum diversity.";
            tmpl.few_shot_examples = {
                "We will listen, we will learn, and we will deliver.",
                "Better products, better service, better prices.",
                "First we stabilize, then we grow, then we lead.",
                "Quality in our design, quality in our build, quality in our support.",
                "This team is faster, smarter, and hungrier than ever before.",
                "Step by step, day by day, customer by customer, we are winning trust."};
            break;
        case CLTLabel::sentiment_of_the_collective:
            tmpl.instruction =
                "Generate {count} individual sentences for the following: Generate sentences "
                "that voice the shared feelings of the group, expressing what the collective "
                "senses or needs. Present each sentence as it would be spoken during a speech, "
                "with a focus on achieving maximum diversity.";
            tmpl.few_shot_examples = {
                "All of us feel the pride of what this team has built together.",
                "We share the same frustration when our customers wait too long.",
                "Everyone in this room knows the excitement of a product launch.",
                "Together we carry the hopes of the communities we serve.",
                "Each of us senses that this is our moment.",
                "We all want the same thing: work that matters and a team that has our back."};
            break;
        case CLTLabel::moral_conviction:
            tmpl.instruction =
                "Generate {count} individual sentences for the following: Generate sentences "
                "expressing firm moral conviction, a clear statement of right and wrong or of "
                "duty. Present each sentence as it would be spoken during a speech, with a "
                "focus on achieving maximum diversity.";
            tmpl.few_shot_examples = {
                "Paying fair wages is not a cost, it is a duty.",
                "We will never trade our customers' trust for a quarter's profit.",
                "It is simply wrong to stay silent when our data could save lives.",
                "Honesty with our partners comes before any deal.",
                "Protecting the planet is the right thing to do, whatever the price.",
                "Integrity is not negotiable in this house."};
            break;
        case CLTLabel::confidence_in_goals:
            tmpl.instruction =
                "Generate {count} individual sentences for the following: Generate sentences "
                "expressing unshakable confidence that the stated goals will be achieved. "
                "Present each sentence as it would be spoken during a speech, with a focus on "
                "achieving maximum diversity.";
            tmpl.few_shot_examples = {
                "I have no doubt that we will hit every milestone on this roadmap.",
                "We will reach that goal, and nothing will stop us.",
                "I am certain this team can outbuild anyone in the field.",
                "Mark my words: this plant will run carbon-free, and sooner than they think.",
                "There is no question in my mind that we will double our impact.",
                "We have done harder things before, and we will do this too."};
            break;
    }
    return tmpl;
}

}  // namespace charisma
