#include "xml_reader.hpp"

#include <cctype>
#include <cstdlib>
#include <cstring>

#include "pathmine/errors.hpp"

namespace pathmine::detail {

namespace {

class Parser {
 public:
  explicit Parser(const std::string& src) : src_(src) {}

  XmlNode parse_document() {
    skip_misc();
    if (eof()) fail("document has no root element");
    XmlNode root = parse_element();
    skip_misc();
    if (!eof()) fail("trailing content after root element");
    return root;
  }

 private:
  const std::string& src_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& detail) const { throw MalformedXml(pos_, detail); }

  bool eof() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }
  bool starts_with(const char* s) const { return src_.compare(pos_, std::strlen(s), s) == 0; }

  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  void skip_until(const char* token) {
    const auto at = src_.find(token, pos_);
    if (at == std::string::npos) fail(std::string("unterminated section, expected '") + token + "'");
    pos_ = at + std::strlen(token);
  }

  // whitespace, comments, processing instructions, doctype
  void skip_misc() {
    while (true) {
      skip_ws();
      if (starts_with("<!--")) {
        skip_until("-->");
      } else if (starts_with("<?")) {
        skip_until("?>");
      } else if (starts_with("<!DOCTYPE") || starts_with("<!doctype")) {
        skip_until(">");
      } else {
        return;
      }
    }
  }

  static std::string strip_prefix(const std::string& name) {
    const auto colon = name.rfind(':');
    return colon == std::string::npos ? name : name.substr(colon + 1);
  }

  std::string read_name() {
    const std::size_t start = pos_;
    while (!eof()) {
      const char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
          c == ':') {
        ++pos_;
      } else {
        break;
      }
    }
    if (pos_ == start) fail("expected a name");
    return src_.substr(start, pos_ - start);
  }

  std::string decode_entities(const std::string& raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '&') {
        out.push_back(raw[i]);
        continue;
      }
      const auto end = raw.find(';', i);
      if (end == std::string::npos) fail("unterminated entity");
      const std::string ent = raw.substr(i + 1, end - i - 1);
      if (ent == "amp") out.push_back('&');
      else if (ent == "lt") out.push_back('<');
      else if (ent == "gt") out.push_back('>');
      else if (ent == "quot") out.push_back('"');
      else if (ent == "apos") out.push_back('\'');
      else if (!ent.empty() && ent[0] == '#') {
        long code = ent[1] == 'x' || ent[1] == 'X' ? std::strtol(ent.c_str() + 2, nullptr, 16)
                                                   : std::strtol(ent.c_str() + 1, nullptr, 10);
        if (code <= 0 || code > 0x10FFFF) fail("bad character reference");
        // encode as UTF-8
        const unsigned cp = static_cast<unsigned>(code);
        if (cp < 0x80) {
          out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
          out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
          out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
          out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
          out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
          out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
          out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
          out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
          out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
          out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
      } else {
        fail("unknown entity '&" + ent + ";'");
      }
      i = end;
    }
    return out;
  }

  std::string read_attribute_value() {
    if (eof() || (peek() != '"' && peek() != '\'')) fail("expected quoted attribute value");
    const char quote = peek();
    ++pos_;
    const std::size_t start = pos_;
    while (!eof() && peek() != quote) ++pos_;
    if (eof()) fail("unterminated attribute value");
    std::string raw = src_.substr(start, pos_ - start);
    ++pos_;
    return decode_entities(raw);
  }

  XmlNode parse_element() {
    if (eof() || peek() != '<') fail("expected '<'");
    ++pos_;
    XmlNode node;
    node.name = strip_prefix(read_name());
    while (true) {
      skip_ws();
      if (eof()) fail("unterminated start tag");
      if (peek() == '>') {
        ++pos_;
        parse_content(node);
        return node;
      }
      if (starts_with("/>")) {
        pos_ += 2;
        return node;
      }
      std::string attr_name = read_name();
      skip_ws();
      if (eof() || peek() != '=') fail("expected '=' after attribute name");
      ++pos_;
      skip_ws();
      node.attributes.emplace_back(std::move(attr_name), read_attribute_value());
    }
  }

  void parse_content(XmlNode& node) {
    std::string text;
    while (true) {
      if (eof()) fail("unterminated element '" + node.name + "'");
      if (peek() == '<') {
        if (starts_with("<!--")) {
          skip_until("-->");
          continue;
        }
        if (starts_with("<![CDATA[")) {
          pos_ += 9;
          const auto end = src_.find("]]>", pos_);
          if (end == std::string::npos) fail("unterminated CDATA");
          text.append(src_, pos_, end - pos_);
          pos_ = end + 3;
          continue;
        }
        if (starts_with("<?")) {
          skip_until("?>");
          continue;
        }
        if (starts_with("</")) {
          pos_ += 2;
          const std::string close = strip_prefix(read_name());
          if (close != node.name)
            fail("mismatched closing tag '" + close + "' for '" + node.name + "'");
          skip_ws();
          if (eof() || peek() != '>') fail("malformed closing tag");
          ++pos_;
          node.text = decode_entities(text);
          return;
        }
        node.children.push_back(parse_element());
      } else {
        text.push_back(peek());
        ++pos_;
      }
    }
  }
};

}  // namespace

XmlNode parse_xml(const std::string& source) {
  Parser parser(source);
  return parser.parse_document();
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace pathmine::detail
