#pragma once

#include "mga/metamodel.hpp"

namespace mga::meta::detail {

DecodeResult decode_element(const xml::Element& root);

/// Strict decode of an already parsed document.
Project project_from_element(const xml::Element& root);

std::string format_double(double v);

}  // namespace mga::meta::detail
