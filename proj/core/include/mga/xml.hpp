#pragma once

// Minimal XML element tree on top of expat. Names are kept as written
// (prefix included); namespace resolution is left to the caller.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mga::xml {

struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::string text;
  std::vector<Element> children;

  const std::string* attribute(std::string_view key) const;
  void set_attribute(std::string key, std::string value);
  bool operator==(const Element&) const = default;
};

/// Throws MalformedXml with expat's line/column on failure. Whitespace-only
/// text inside elements that have children is dropped.
Element parse(std::string_view text);

/// Pretty-printed document with an XML declaration.
std::string serialize_document(const Element& root);

/// Appends `element` at the given indentation depth.
void serialize(const Element& element, std::string& out, int depth);

std::string escape(std::string_view text, bool in_attribute);

/// "ext:foo" -> "ext"; "foo" -> "".
std::string_view prefix_of(std::string_view qualified_name);
std::string_view local_name(std::string_view qualified_name);

}  // namespace mga::xml
