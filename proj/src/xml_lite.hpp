#ifndef AVGUARD_XML_LITE_HPP
#define AVGUARD_XML_LITE_HPP

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace avguard::xml {

// Small XML subset reader: elements, attributes, character data, comments,
// an optional prolog, and the five predefined entities. Enough for the
// closed manifest schema; tracks line numbers for diagnostics.
struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;  // document order
  std::vector<Element> children;                                // document order
  std::string text;  // concatenated character data directly under this element
  int line = 0;

  const std::string* attribute(const std::string& key) const;
  const Element* child(const std::string& name) const;
};

// Throws AvError(MalformedXml) with a line number on any lexical error.
Element parse_document(const std::string& input);

std::string escape_text(const std::string& raw);
std::string escape_attribute(const std::string& raw);

}  // namespace avguard::xml

#endif  // AVGUARD_XML_LITE_HPP
