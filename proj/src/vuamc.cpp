#include "charisma/vuamc.hpp"

#include <fstream>
#include <sstream>

#include "charisma/errors.hpp"
#include "charisma/text_norm.hpp"

namespace charisma {

namespace xml {

namespace {

class Scanner {
public:
    explicit Scanner(const std::string& content) : content_(content) {}

    Node parse() {
        skip_prolog();
        Node root = parse_element();
        skip_misc();
        if (pos_ != content_.size()) {
            fail("trailing content after document element");
        }
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("XML line " + std::to_string(line_) + ": " + what);
    }

    bool eof() const { return pos_ >= content_.size(); }

    char peek() const { return content_[pos_]; }

    char take() {
        char c = content_[pos_++];
        if (c == '\n') {
            ++line_;
        }
        return c;
    }

    bool starts_with(const char* prefix) const {
        return content_.compare(pos_, std::char_traits<char>::length(prefix), prefix) == 0;
    }

    void expect(char c) {
        if (eof() || peek() != c) {
            fail(std::string("expected '") + c + "'");
        }
        take();
    }

    void skip_whitespace() {
        while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r' || peek() == '\n')) {
            take();
        }
    }

    void skip_until(const char* terminator) {
        std::size_t at = content_.find(terminator, pos_);
        if (at == std::string::npos) {
            fail(std::string("unterminated construct, missing \"") + terminator + "\"");
        }
        while (pos_ < at + std::char_traits<char>::length(terminator)) {
            take();
        }
    }

    void skip_misc() {
        while (!eof()) {
            if (starts_with("<!--")) {
                skip_until("-->");
            } else if (starts_with("<?")) {
                skip_until("?>");
            } else if (peek() == ' ' || peek() == '\t' || peek() == '\r' || peek() == '\n') {
                take();
            } else {
                break;
            }
        }
    }

    void skip_prolog() {
        for (;;) {
            skip_misc();
            if (starts_with("<!DOCTYPE")) {
                // Skip to matching '>', tolerating an internal subset.
                int depth = 0;
                while (!eof()) {
                    char c = take();
                    if (c == '[') {
                        ++depth;
                    } else if (c == ']') {
                        --depth;
                    } else if (c == '>' && depth <= 0) {
                        break;
                    }
                }
                continue;
            }
            break;
        }
        if (eof() || peek() != '<') {
            fail("expected document element");
        }
    }

    static bool is_name_char(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == '_' || c == '-' || c == '.' || c == ':';
    }

    std::string parse_name() {
        std::string name;
        while (!eof() && is_name_char(peek())) {
            name.push_back(take());
        }
        if (name.empty()) {
            fail("expected a name");
        }
        // Strip a namespace prefix ("tei:s" -> "s").
        auto colon = name.rfind(':');
        if (colon != std::string::npos) {
            name = name.substr(colon + 1);
        }
        return name;
    }

    std::string decode_entities(const std::string& raw) {
        std::string out;
        out.reserve(raw.size());
        std::size_t i = 0;
        while (i < raw.size()) {
            if (raw[i] != '&') {
                out.push_back(raw[i++]);
                continue;
            }
            std::size_t semi = raw.find(';', i);
            if (semi == std::string::npos || semi - i > 10) {
                fail("malformed entity reference");
            }
            std::string entity = raw.substr(i + 1, semi - i - 1);
            if (entity == "amp") {
                out.push_back('&');
            } else if (entity == "lt") {
                out.push_back('<');
            } else if (entity == "gt") {
                out.push_back('>');
            } else if (entity == "quot") {
                out.push_back('"');
            } else if (entity == "apos") {
                out.push_back('\'');
            } else if (!entity.empty() && entity[0] == '#') {
                long code = 0;
                try {
                    code = entity[1] == 'x' || entity[1] == 'X'
                               ? std::stol(entity.substr(2), nullptr, 16)
                               : std::stol(entity.substr(1));
                } catch (const std::exception&) {
                    fail("malformed character reference &" + entity + ";");
                }
                append_utf8(out, code);
            } else {
                fail("unknown entity &" + entity + ";");
            }
            i = semi + 1;
        }
        return out;
    }

    static void append_utf8(std::string& out, long code) {
        if (code < 0x80) {
            out.push_back(static_cast<char>(code));
        } else if (code < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (code >> 6)));
            out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
        } else if (code < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (code >> 12)));
            out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (code >> 18)));
            out.push_back(static_cast<char>(0x80 | ((code >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
        }
    }

    std::pair<std::string, std::string> parse_attribute() {
        std::string key = parse_name();
        skip_whitespace();
        expect('=');
        skip_whitespace();
        if (eof() || (peek() != '"' && peek() != '\'')) {
            fail("expected quoted attribute value");
        }
        char quote = take();
        std::string value;
        while (!eof() && peek() != quote) {
            value.push_back(take());
        }
        expect(quote);
        return {key, decode_entities(value)};
    }

    Node parse_element() {
        expect('<');
        Node node;
        node.name = parse_name();
        for (;;) {
            skip_whitespace();
            if (eof()) {
                fail("unterminated start tag <" + node.name);
            }
            if (peek() == '/') {
                take();
                expect('>');
                return node;  // self-closing
            }
            if (peek() == '>') {
                take();
                break;
            }
            node.attributes.push_back(parse_attribute());
        }
        parse_content(node);
        return node;
    }

    // Text runs become "#text" pseudo-children so mixed content keeps its
    // document order; node.text collects the element's own character data.
    void parse_content(Node& node) {
        std::string run;
        auto flush_run = [&]() {
            if (run.empty()) {
                return;
            }
            Node text_node;
            text_node.name = "#text";
            text_node.text = decode_entities(run);
            node.text += text_node.text;
            node.children.push_back(std::move(text_node));
            run.clear();
        };
        for (;;) {
            if (eof()) {
                fail("unexpected end of document inside <" + node.name + ">");
            }
            if (peek() == '<') {
                if (starts_with("<!--")) {
                    skip_until("-->");
                    continue;
                }
                if (starts_with("<![CDATA[")) {
                    flush_run();
                    for (int i = 0; i < 9; ++i) {
                        take();
                    }
                    std::size_t at = content_.find("]]>", pos_);
                    if (at == std::string::npos) {
                        fail("unterminated CDATA section");
                    }
                    Node cdata;
                    cdata.name = "#text";
                    while (pos_ < at) {
                        cdata.text.push_back(take());
                    }
                    skip_until("]]>");
                    node.text += cdata.text;
                    node.children.push_back(std::move(cdata));
                    continue;
                }
                if (starts_with("<?")) {
                    skip_until("?>");
                    continue;
                }
                if (starts_with("</")) {
                    take();
                    take();
                    std::string closing = parse_name();
                    if (closing != node.name) {
                        fail("mismatched closing tag </" + closing + "> for <" + node.name + ">");
                    }
                    skip_whitespace();
                    expect('>');
                    flush_run();
                    return;
                }
                flush_run();
                node.children.push_back(parse_element());
            } else {
                run.push_back(take());
            }
        }
    }

    const std::string& content_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

}  // namespace

const std::string* Node::attribute(const std::string& key) const {
    for (const auto& [k, v] : attributes) {
        if (k == key) {
            return &v;
        }
    }
    return nullptr;
}

Node parse_document(const std::string& content) {
    return Scanner(content).parse();
}

}  // namespace xml

namespace {

// Document-order text of an element, including its children's.
void collect_text(const xml::Node& node, std::string& out) {
    if (node.name == "#text") {
        out += node.text;
        return;
    }
    for (const auto& child : node.children) {
        collect_text(child, out);
    }
}

bool has_metaphor_word(const xml::Node& node) {
    if (node.name == "seg") {
        if (const std::string* function = node.attribute("function")) {
            if (function->find("mrw") != std::string::npos) {
                return true;
            }
        }
    }
    for (const auto& child : node.children) {
        if (has_metaphor_word(child)) {
            return true;
        }
    }
    return false;
}

void collect_sentences(const xml::Node& node, std::vector<LabeledSentence>& out) {
    if (node.name == "s") {
        std::string text;
        collect_text(node, text);
        text = collapse_whitespace(text);
        if (!text.empty() && has_metaphor_word(node)) {
            LabeledSentence sentence;
            const std::string* n_attr = node.attribute("n");
            sentence.id = "vuamc-" + (n_attr != nullptr ? *n_attr
                                                        : std::to_string(out.size() + 1));
            sentence.text = text;
            sentence.label = CLTLabel::metaphor_simile;
            sentence.source = SentenceSource::vuamc;
            if (n_attr != nullptr) {
                sentence.meta["sentence_n"] = *n_attr;
            }
            out.push_back(std::move(sentence));
        }
        return;
    }
    for (const auto& child : node.children) {
        collect_sentences(child, out);
    }
}

}  // namespace

std::vector<LabeledSentence> ingest_vuamc_content(const std::string& xml_content) {
    xml::Node root = xml::parse_document(xml_content);
    std::vector<LabeledSentence> sentences;
    collect_sentences(root, sentences);
    return sentences;
}

std::vector<LabeledSentence> ingest_vuamc(const std::string& xml_path) {
    std::ifstream in(xml_path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open VUAMC file: " + xml_path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return ingest_vuamc_content(buffer.str());
}

}  // namespace charisma
