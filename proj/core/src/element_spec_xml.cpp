#include "mga/quality.hpp"
#include "mga/xml.hpp"

namespace mga::quality {

ElementSpec element_spec_from_xml(std::string_view text) {
  const xml::Element root = xml::parse(text);
  if (root.name != "elementSpec")
    throw Error(ErrorCode::SchemaViolation, "/ root element is <" + root.name +
                                                ">, expected <elementSpec>");
  ElementSpec spec;
  for (const auto& c : root.children) {
    if (c.name == "required") {
      spec.required.insert(c.text);
    } else if (c.name == "recommended") {
      spec.recommended.insert(c.text);
    } else if (c.name == "normalize") {
      const auto* field = c.attribute("field");
      const auto* from = c.attribute("from");
      const auto* to = c.attribute("to");
      if (!field || !from || !to)
        throw Error(ErrorCode::SchemaViolation,
                    "/elementSpec/normalize needs field, from and to attributes");
      spec.normalization[*field][*from] = *to;
    } else {
      throw Error(ErrorCode::SchemaViolation, "/elementSpec/" + c.name + " is not recognised");
    }
  }
  check_spec(spec);
  return spec;
}

std::string element_spec_to_xml(const ElementSpec& spec) {
  xml::Element root;
  root.name = "elementSpec";
  for (const auto& f : spec.required) root.children.push_back({"required", {}, f, {}});
  for (const auto& f : spec.recommended) root.children.push_back({"recommended", {}, f, {}});
  for (const auto& [field, map] : spec.normalization) {
    for (const auto& [from, to] : map) {
      xml::Element n;
      n.name = "normalize";
      n.attributes = {{"field", field}, {"from", from}, {"to", to}};
      root.children.push_back(std::move(n));
    }
  }
  return xml::serialize_document(root);
}

}  // namespace mga::quality
