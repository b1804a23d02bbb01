#include "xml_lite.hpp"

#include <cctype>

#include "avguard/errors.hpp"

namespace avguard::xml {

const std::string* Element::attribute(const std::string& key) const {
  for (const auto& [k, v] : attributes)
    if (k == key) return &v;
  return nullptr;
}

const Element* Element::child(const std::string& child_name) const {
  for (const auto& c : children)
    if (c.name == child_name) return &c;
  return nullptr;
}

namespace {

struct Cursor {
  const std::string& s;
  size_t pos = 0;
  int line = 1;

  bool eof() const { return pos >= s.size(); }
  char peek() const { return s[pos]; }

  char next() {
    char c = s[pos++];
    if (c == '\n') ++line;
    return c;
  }

  bool starts_with(const char* lit) const {
    return s.compare(pos, std::string::traits_type::length(lit), lit) == 0;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw AvError(ErrorCode::MalformedXml,
                  what + " at line " + std::to_string(line));
  }
};

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         c == '.' || c == ':';
}

void skip_ws(Cursor& c) {
  while (!c.eof() && std::isspace(static_cast<unsigned char>(c.peek()))) c.next();
}

std::string read_name(Cursor& c) {
  std::string name;
  while (!c.eof() && is_name_char(c.peek())) name += c.next();
  if (name.empty()) c.fail("expected name");
  return name;
}

char decode_entity(Cursor& c) {
  std::string ent;
  while (!c.eof() && c.peek() != ';') ent += c.next();
  if (c.eof()) c.fail("unterminated entity");
  c.next();  // ';'
  if (ent == "amp") return '&';
  if (ent == "lt") return '<';
  if (ent == "gt") return '>';
  if (ent == "quot") return '"';
  if (ent == "apos") return '\'';
  c.fail("unknown entity &" + ent + ";");
}

std::string read_attribute_value(Cursor& c) {
  if (c.eof() || (c.peek() != '"' && c.peek() != '\'')) c.fail("expected quoted value");
  char quote = c.next();
  std::string value;
  while (!c.eof() && c.peek() != quote) {
    char ch = c.next();
    if (ch == '&')
      value += decode_entity(c);
    else
      value += ch;
  }
  if (c.eof()) c.fail("unterminated attribute value");
  c.next();  // closing quote
  return value;
}

void skip_comment(Cursor& c) {
  // cursor sits right after "<!--"
  while (!c.eof()) {
    if (c.starts_with("-->")) {
      c.next(); c.next(); c.next();
      return;
    }
    c.next();
  }
  c.fail("unterminated comment");
}

Element parse_element(Cursor& c);

// Parses attributes plus the '>' or '/>' tail; returns true when self-closing.
bool parse_tag_remainder(Cursor& c, Element& el) {
  while (true) {
    skip_ws(c);
    if (c.eof()) c.fail("unterminated tag <" + el.name + ">");
    if (c.peek() == '/') {
      c.next();
      if (c.eof() || c.next() != '>') c.fail("malformed empty-element tag");
      return true;
    }
    if (c.peek() == '>') {
      c.next();
      return false;
    }
    std::string key = read_name(c);
    skip_ws(c);
    if (c.eof() || c.next() != '=') c.fail("expected '=' after attribute " + key);
    skip_ws(c);
    if (el.attribute(key)) c.fail("duplicate attribute " + key);
    el.attributes.emplace_back(key, read_attribute_value(c));
  }
}

void parse_content(Cursor& c, Element& el) {
  while (true) {
    if (c.eof()) c.fail("missing </" + el.name + ">");
    if (c.peek() == '<') {
      if (c.starts_with("<!--")) {
        c.next(); c.next(); c.next(); c.next();
        skip_comment(c);
        continue;
      }
      if (c.starts_with("</")) {
        c.next(); c.next();
        std::string closing = read_name(c);
        if (closing != el.name)
          c.fail("mismatched closing tag </" + closing + "> for <" + el.name + ">");
        skip_ws(c);
        if (c.eof() || c.next() != '>') c.fail("malformed closing tag");
        return;
      }
      el.children.push_back(parse_element(c));
      continue;
    }
    char ch = c.next();
    if (ch == '&')
      el.text += decode_entity(c);
    else
      el.text += ch;
  }
}

Element parse_element(Cursor& c) {
  if (c.eof() || c.next() != '<') c.fail("expected element");
  Element el;
  el.line = c.line;
  el.name = read_name(c);
  if (parse_tag_remainder(c, el)) return el;
  parse_content(c, el);
  return el;
}

}  // namespace

Element parse_document(const std::string& input) {
  Cursor c{input};
  skip_ws(c);
  if (c.starts_with("<?xml")) {
    while (!c.eof() && !c.starts_with("?>")) c.next();
    if (c.eof()) c.fail("unterminated prolog");
    c.next(); c.next();
  }
  skip_ws(c);
  while (c.starts_with("<!--")) {
    c.next(); c.next(); c.next(); c.next();
    skip_comment(c);
    skip_ws(c);
  }
  if (c.eof()) c.fail("empty document");
  Element root = parse_element(c);
  skip_ws(c);
  if (!c.eof()) c.fail("trailing content after root element");
  return root;
}

std::string escape_text(const std::string& raw) {
  std::string out;
  out.reserve(raw.size());
  for (char ch : raw) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string escape_attribute(const std::string& raw) {
  std::string out = escape_text(raw);
  std::string result;
  for (char ch : out) {
    if (ch == '"')
      result += "&quot;";
    else
      result += ch;
  }
  return result;
}

}  // namespace avguard::xml
