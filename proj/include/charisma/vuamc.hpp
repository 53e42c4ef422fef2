#pragma once

#include <string>
#include <vector>

#include "charisma/corpus.hpp"

namespace charisma {

namespace xml {

// Just enough XML for TEI corpora: elements, attributes, text, comments,
// CDATA, character/entity references. No namespaces beyond prefix
// stripping, no DTD validation. Text runs appear in `children` as "#text"
// pseudo-nodes so mixed content keeps its document order.
struct Node {
    std::string name;  // local name, prefix stripped; "#text" for text runs
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<Node> children;
    std::string text;  // this element's own character data, concatenated

    const std::string* attribute(const std::string& key) const;
};

/// Parses a whole document. Throws ParseError with a line number.
Node parse_document(const std::string& content);

}  // namespace xml

// Emits one metaphor_simile sentence per <s> element that contains at
// least one metaphor-related word (<seg function="mrw">). Unflagged
// sentences are skipped. Order follows the document.
std::vector<LabeledSentence> ingest_vuamc(const std::string& xml_path);

/// Same, on an in-memory document (fixtures, tests).
std::vector<LabeledSentence> ingest_vuamc_content(const std::string& xml_content);

}  // namespace charisma
