#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace pathmine::detail {

/// Minimal XML element tree. Element names are stored without their
/// namespace prefix; attribute names are kept verbatim. Comments, prolog,
/// DOCTYPE and CDATA sections are skipped; the five standard entities are
/// decoded in text and attribute values.
struct XmlNode {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<XmlNode> children;
  std::string text;  // concatenated character data directly inside this element

  const std::string* attribute(const std::string& key) const {
    for (const auto& [k, v] : attributes)
      if (k == key) return &v;
    return nullptr;
  }

  const XmlNode* first_child(const std::string& child_name) const {
    for (const auto& c : children)
      if (c.name == child_name) return &c;
    return nullptr;
  }
};

/// Parses a whole document and returns its root element.
/// Throws MalformedXml with the byte offset of the problem.
XmlNode parse_xml(const std::string& source);

/// Escapes &, <, >, " and ' for use in XML text or attribute values.
std::string xml_escape(const std::string& s);

}  // namespace pathmine::detail
