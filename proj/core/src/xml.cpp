#include "mga/xml.hpp"

#include <expat.h>

#include <algorithm>
#include <memory>

#include "mga/error.hpp"

namespace mga::xml {

namespace {

struct Builder {
  std::vector<Element> stack;
  Element root;
  bool done = false;
};

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; });
}

void XMLCALL on_start(void* data, const XML_Char* name, const XML_Char** attrs) {
  auto* b = static_cast<Builder*>(data);
  Element e;
  e.name = name;
  for (int i = 0; attrs[i]; i += 2) e.attributes.emplace_back(attrs[i], attrs[i + 1]);
  b->stack.push_back(std::move(e));
}

void XMLCALL on_end(void* data, const XML_Char*) {
  auto* b = static_cast<Builder*>(data);
  Element e = std::move(b->stack.back());
  b->stack.pop_back();
  if (!e.children.empty() && blank(e.text)) e.text.clear();
  if (b->stack.empty()) {
    b->root = std::move(e);
    b->done = true;
  } else {
    b->stack.back().children.push_back(std::move(e));
  }
}

void XMLCALL on_text(void* data, const XML_Char* s, int len) {
  auto* b = static_cast<Builder*>(data);
  if (!b->stack.empty()) b->stack.back().text.append(s, static_cast<std::size_t>(len));
}

bool mixed(const Element& e) { return !e.children.empty() && !blank(e.text); }

void serialize_compact(const Element& e, std::string& out) {
  out += '<';
  out += e.name;
  for (const auto& [k, v] : e.attributes) {
    out += ' ';
    out += k;
    out += "=\"";
    out += escape(v, true);
    out += '"';
  }
  if (e.children.empty() && e.text.empty()) {
    out += "/>";
    return;
  }
  out += '>';
  out += escape(e.text, false);
  for (const Element& c : e.children) serialize_compact(c, out);
  out += "</";
  out += e.name;
  out += '>';
}

}  // namespace

const std::string* Element::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes)
    if (k == key) return &v;
  return nullptr;
}

void Element::set_attribute(std::string key, std::string value) {
  for (auto& [k, v] : attributes) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  attributes.emplace_back(std::move(key), std::move(value));
}

Element parse(std::string_view text) {
  std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(
      XML_ParserCreate("UTF-8"), &XML_ParserFree);
  Builder builder;
  XML_SetUserData(parser.get(), &builder);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_text);

  // Feed in bounded pieces; XML_Parse takes an int length.
  constexpr std::size_t kPiece = 1u << 24;
  std::size_t pos = 0;
  do {
    const std::size_t n = std::min(kPiece, text.size() - pos);
    const bool last = pos + n == text.size();
    if (XML_Parse(parser.get(), text.data() + pos, static_cast<int>(n), last) == XML_STATUS_ERROR) {
      throw Error(ErrorCode::MalformedXml,
                  std::string("XML not well-formed at line ") +
                      std::to_string(XML_GetCurrentLineNumber(parser.get())) + ", column " +
                      std::to_string(XML_GetCurrentColumnNumber(parser.get())) + ": " +
                      XML_ErrorString(XML_GetErrorCode(parser.get())));
    }
    pos += n;
  } while (pos < text.size());
  if (!builder.done) throw Error(ErrorCode::MalformedXml, "XML document has no root element");
  return std::move(builder.root);
}

std::string escape(std::string_view text, bool in_attribute) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += in_attribute ? "&quot;" : "\""; break;
      case '\n': out += in_attribute ? "&#10;" : "\n"; break;
      case '\r': out += "&#13;"; break;
      case '\t': out += in_attribute ? "&#9;" : "\t"; break;
      default: out += c;
    }
  }
  return out;
}

void serialize(const Element& e, std::string& out, int depth) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  if (mixed(e) || e.children.empty()) {
    serialize_compact(e, out);
    out += '\n';
    return;
  }
  out += '<';
  out += e.name;
  for (const auto& [k, v] : e.attributes) {
    out += ' ';
    out += k;
    out += "=\"";
    out += escape(v, true);
    out += '"';
  }
  out += ">\n";
  for (const Element& c : e.children) serialize(c, out, depth + 1);
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += "</";
  out += e.name;
  out += ">\n";
}

std::string serialize_document(const Element& root) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  serialize(root, out, 0);
  return out;
}

std::string_view prefix_of(std::string_view name) {
  const auto colon = name.find(':');
  return colon == std::string_view::npos ? std::string_view{} : name.substr(0, colon);
}

std::string_view local_name(std::string_view name) {
  const auto colon = name.find(':');
  return colon == std::string_view::npos ? name : name.substr(colon + 1);
}

}  // namespace mga::xml
