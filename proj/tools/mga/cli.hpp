#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mga/metamodel.hpp"

namespace mga::tools {

/// Exit codes: 0 success, 1 domain/validation errors, 2 usage or I/O errors.
struct CommandResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

/// argv[0] is the program name.
CommandResult run(const std::vector<std::string>& argv);

/// Body shared by `mga assemble` and GET /api/assemble.
nlohmann::json assemble_json(const meta::Project& project, std::uint64_t target_ms,
                             bool allow_overflow);

/// {"code": ..., "message": ...} for a library error.
nlohmann::json error_json(const std::exception& e);

}  // namespace mga::tools
