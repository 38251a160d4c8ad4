#pragma once

#include <nlohmann/json.hpp>

#include "mga/metamodel.hpp"

namespace mga::meta {

// JSON view used by the HTTP API. Foreign extensions are not exposed.
nlohmann::json to_json(const Segment& segment);
nlohmann::json to_json(const Track& track);
nlohmann::json to_json(const Programme& programme);
nlohmann::json to_json(const Project& project);

}  // namespace mga::meta
