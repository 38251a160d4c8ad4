#pragma once

// Completeness and consistency scoring over flat metadata records.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mga/metamodel.hpp"

namespace mga::quality {

/// A record maps field names to one or more raw values.
struct Record {
  std::string id;
  std::map<std::string, std::vector<std::string>> fields;
};

struct ElementSpec {
  std::set<std::string> required;
  std::set<std::string> recommended;
  // field -> (raw value -> canonical value)
  std::map<std::string, std::map<std::string, std::string>> normalization;
};

/// Throws InvalidSpec when required and recommended overlap or a mapping
/// target is not itself canonical.
void check_spec(const ElementSpec& spec);

/// Identity for values the field's map does not mention.
std::string canonical(const ElementSpec& spec, const std::string& field, const std::string& raw);

/// Exact k/n; n is the size of the required set.
struct Score {
  std::uint64_t present = 0;
  std::uint64_t required = 0;

  double value() const noexcept {
    return required == 0 ? 0.0 : static_cast<double>(present) / static_cast<double>(required);
  }
  bool operator==(const Score&) const = default;
};

struct Completeness {
  Score score;
  std::vector<std::string> missing_required;
  std::vector<std::string> missing_recommended;
};

enum class Severity { info, warning, error };
std::string_view to_string(Severity s) noexcept;

struct Finding {
  Severity severity = Severity::info;
  std::string code;
  std::string record_id;
  std::string field;
  std::string message;

  bool operator==(const Finding&) const = default;
};

struct FieldConsistency {
  std::string field;
  std::map<std::string, std::set<std::string>> classes;  // canonical -> raw variants
  bool consistent = true;    // every class has a single raw variant
  bool normalizable = true;  // every raw value is known to the map
  std::vector<Finding> findings;
};

struct RecordScore {
  std::string record_id;
  Score completeness;
  std::vector<std::string> missing_required;
  std::vector<std::string> missing_recommended;
};

struct CollectionStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::array<std::uint64_t, 10> histogram{};  // bucket i holds scores in [i/10, (i+1)/10), 1.0 in 9
};

struct QualityReport {
  std::vector<RecordScore> per_record;
  CollectionStats collection;
  std::vector<FieldConsistency> consistency;  // fields alphabetical
  std::vector<Finding> findings;

  bool has_errors() const noexcept;
};

/// Whitespace-only values count as missing.
Completeness completeness(const Record& record, const ElementSpec& spec);

FieldConsistency consistency(std::span<const Record> records, const std::string& field,
                             const ElementSpec& spec);

/// `reference`, when given, is a second silo keyed by record id; differing
/// values for the same id are reported as DIVERGENT_VALUE.
QualityReport assess(std::span<const Record> records, const ElementSpec& spec,
                     std::optional<std::span<const Record>> reference = std::nullopt);

/// One record per segment: label, loi, topics, location, timestamp and the
/// programme's formal keys.
std::vector<Record> project_records(const meta::Project& project);

QualityReport validate_project(const meta::Project& project, const ElementSpec& spec);

/// required {label, loi}; recommended {location, timestamp, topics}.
ElementSpec default_segment_spec();

nlohmann::json to_json(const QualityReport& report);
std::string to_text(const QualityReport& report);

/// <elementSpec> document: <required>f</required>, <recommended>f</recommended>,
/// <normalize field="f" from="raw" to="canonical"/>.
ElementSpec element_spec_from_xml(std::string_view text);
std::string element_spec_to_xml(const ElementSpec& spec);

}  // namespace mga::quality
