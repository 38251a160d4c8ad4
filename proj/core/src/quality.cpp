#include "mga/quality.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>

#include "project_xml_internal.hpp"

namespace mga::quality {

namespace {

bool blank(const std::string& v) {
  return std::all_of(v.begin(), v.end(), [](unsigned char c) { return std::isspace(c); });
}

bool has_value(const Record& r, const std::string& field) {
  auto it = r.fields.find(field);
  if (it == r.fields.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(),
                     [](const std::string& v) { return !blank(v); });
}

std::string format_score(const Score& s) {
  return std::to_string(s.present) + "/" + std::to_string(s.required);
}

std::string join(const std::set<std::string>& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ", ";
    out += v;
  }
  return out;
}

}  // namespace

std::string_view to_string(Severity s) noexcept {
  switch (s) {
    case Severity::info: return "info";
    case Severity::warning: return "warning";
    case Severity::error: return "error";
  }
  return "info";
}

bool QualityReport::has_errors() const noexcept {
  return std::any_of(findings.begin(), findings.end(),
                     [](const Finding& f) { return f.severity == Severity::error; });
}

void check_spec(const ElementSpec& spec) {
  for (const auto& f : spec.required) {
    if (spec.recommended.count(f))
      throw Error(ErrorCode::InvalidSpec,
                  "field '" + f + "' is both required and recommended");
  }
  for (const auto& [field, map] : spec.normalization) {
    for (const auto& [raw, canon] : map) {
      auto again = map.find(canon);
      if (again != map.end() && again->second != canon)
        throw Error(ErrorCode::InvalidSpec, "normalization of '" + field + "' maps '" + raw +
                                                "' to '" + canon +
                                                "', which is itself remapped");
    }
  }
}

std::string canonical(const ElementSpec& spec, const std::string& field, const std::string& raw) {
  auto f = spec.normalization.find(field);
  if (f == spec.normalization.end()) return raw;
  auto it = f->second.find(raw);
  return it == f->second.end() ? raw : it->second;
}

Completeness completeness(const Record& record, const ElementSpec& spec) {
  if (spec.required.empty())
    throw Error(ErrorCode::EmptySpec, "element spec has no required fields; score undefined");
  Completeness c;
  c.score.required = spec.required.size();
  for (const auto& f : spec.required) {
    if (has_value(record, f)) {
      ++c.score.present;
    } else {
      c.missing_required.push_back(f);
    }
  }
  for (const auto& f : spec.recommended)
    if (!has_value(record, f)) c.missing_recommended.push_back(f);
  return c;
}

FieldConsistency consistency(std::span<const Record> records, const std::string& field,
                             const ElementSpec& spec) {
  FieldConsistency out;
  out.field = field;
  const auto map_it = spec.normalization.find(field);
  const bool mapped = map_it != spec.normalization.end();
  std::set<std::string> canonical_values;
  if (mapped)
    for (const auto& [raw, canon] : map_it->second) canonical_values.insert(canon);

  for (const Record& r : records) {
    auto it = r.fields.find(field);
    if (it == r.fields.end()) continue;
    for (const auto& raw : it->second) {
      if (blank(raw)) continue;
      out.classes[canonical(spec, field, raw)].insert(raw);
      if (mapped && !map_it->second.count(raw) && !canonical_values.count(raw)) {
        out.normalizable = false;
        out.findings.push_back({Severity::warning, "UNKNOWN_VARIANT", r.id, field,
                                "value '" + raw + "' has no canonical form"});
      }
    }
  }
  for (const auto& [canon, variants] : out.classes) {
    if (variants.size() > 1) {
      out.consistent = false;
      out.findings.push_back({Severity::warning, "INCONSISTENT_FIELD", "", field,
                              "'" + canon + "' is written " + std::to_string(variants.size()) +
                                  " ways: " + join(variants)});
    }
  }
  return out;
}

QualityReport assess(std::span<const Record> records, const ElementSpec& spec,
                     std::optional<std::span<const Record>> reference) {
  if (records.empty()) throw Error(ErrorCode::EmptyCollection, "no records to assess");
  check_spec(spec);

  QualityReport report;
  std::uint64_t present_sum = 0;
  std::uint64_t min_present = UINT64_MAX;
  std::uint64_t max_present = 0;
  std::uint64_t required = 0;
  for (const Record& r : records) {
    Completeness c = completeness(r, spec);
    required = c.score.required;
    present_sum += c.score.present;
    min_present = std::min(min_present, c.score.present);
    max_present = std::max(max_present, c.score.present);
    report.collection.histogram[std::min<std::uint64_t>(9, c.score.present * 10 / required)]++;
    for (const auto& f : c.missing_required)
      report.findings.push_back({Severity::error, "MISSING_REQUIRED", r.id, f,
                                 "required field '" + f + "' is missing"});
    for (const auto& f : c.missing_recommended)
      report.findings.push_back({Severity::info, "MISSING_RECOMMENDED", r.id, f,
                                 "recommended field '" + f + "' is missing"});
    report.per_record.push_back(
        {r.id, c.score, std::move(c.missing_required), std::move(c.missing_recommended)});
  }

  const double denom = static_cast<double>(required);
  report.collection.mean =
      static_cast<double>(present_sum) / (static_cast<double>(records.size()) * denom);
  report.collection.min = static_cast<double>(min_present) / denom;
  report.collection.max = static_cast<double>(max_present) / denom;
  if (min_present != max_present) {
    report.findings.push_back(
        {Severity::warning, "UNEVEN_COMPLETENESS", "", "",
         "record completeness ranges from " + format_score({min_present, required}) + " to " +
             format_score({max_present, required})});
  }

  std::set<std::string> fields;
  for (const Record& r : records)
    for (const auto& [f, values] : r.fields) fields.insert(f);
  for (const auto& f : fields) {
    FieldConsistency fc = consistency(records, f, spec);
    report.findings.insert(report.findings.end(), fc.findings.begin(), fc.findings.end());
    report.consistency.push_back(std::move(fc));
  }

  if (reference) {
    for (const Record& r : records) {
      auto other = std::find_if(reference->begin(), reference->end(),
                                [&](const Record& o) { return o.id == r.id; });
      if (other == reference->end()) continue;
      for (const auto& [f, values] : r.fields) {
        auto theirs = other->fields.find(f);
        if (theirs == other->fields.end()) continue;
        std::set<std::string> a, b;
        for (const auto& v : values)
          if (!blank(v)) a.insert(canonical(spec, f, v));
        for (const auto& v : theirs->second)
          if (!blank(v)) b.insert(canonical(spec, f, v));
        if (!a.empty() && !b.empty() && a != b)
          report.findings.push_back({Severity::warning, "DIVERGENT_VALUE", r.id, f,
                                     "'" + join(a) + "' here, '" + join(b) + "' in reference"});
      }
    }
  }
  return report;
}

std::vector<Record> project_records(const meta::Project& project) {
  std::vector<Record> out;
  for (const auto& s : project.segments) {
    Record r;
    r.id = s.id;
    for (const auto& [k, v] : project.programme.formal) r.fields[k] = {v};
    r.fields["label"] = {s.label};
    if (s.loi >= 1) r.fields["loi"] = {std::to_string(s.loi)};
    r.fields["topics"] = std::vector<std::string>(s.topics.begin(), s.topics.end());
    if (s.location)
      r.fields["location"] = {meta::detail::format_double(s.location->lat) + "," +
                              meta::detail::format_double(s.location->lon)};
    if (s.timestamp) r.fields["timestamp"] = {meta::format_instant(*s.timestamp)};
    out.push_back(std::move(r));
  }
  return out;
}

QualityReport validate_project(const meta::Project& project, const ElementSpec& spec) {
  const auto records = project_records(project);
  return assess(records, spec);
}

ElementSpec default_segment_spec() {
  ElementSpec spec;
  spec.required = {"label", "loi"};
  spec.recommended = {"location", "timestamp", "topics"};
  return spec;
}

nlohmann::json to_json(const QualityReport& report) {
  using nlohmann::json;
  json per_record = json::array();
  for (const auto& r : report.per_record) {
    per_record.push_back({{"record_id", r.record_id},
                          {"completeness", r.completeness.value()},
                          {"present", r.completeness.present},
                          {"required", r.completeness.required},
                          {"missing_required", r.missing_required},
                          {"missing_recommended", r.missing_recommended}});
  }
  json consistency = json::array();
  for (const auto& fc : report.consistency) {
    json classes = json::array();
    for (const auto& [canon, variants] : fc.classes)
      classes.push_back({{"canonical", canon}, {"variants", variants}});
    consistency.push_back({{"field", fc.field},
                           {"consistent", fc.consistent},
                           {"normalizable", fc.normalizable},
                           {"classes", classes}});
  }
  json findings = json::array();
  for (const auto& f : report.findings) {
    findings.push_back({{"severity", to_string(f.severity)},
                        {"code", f.code},
                        {"record_id", f.record_id},
                        {"field", f.field},
                        {"message", f.message}});
  }
  return {{"per_record", per_record},
          {"collection",
           {{"records", report.per_record.size()},
            {"mean", report.collection.mean},
            {"min", report.collection.min},
            {"max", report.collection.max},
            {"histogram", report.collection.histogram}}},
          {"consistency", consistency},
          {"findings", findings}};
}

std::string to_text(const QualityReport& report) {
  std::ostringstream out;
  char line[512];
  std::snprintf(line, sizeof line, "%-24s %-8s %-28s %s\n", "RECORD", "SCORE", "MISSING REQUIRED",
                "MISSING RECOMMENDED");
  out << line;
  auto list = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
    return s.empty() ? std::string("-") : s;
  };
  for (const auto& r : report.per_record) {
    const std::string score =
        std::to_string(r.completeness.present) + "/" + std::to_string(r.completeness.required);
    std::snprintf(line, sizeof line, "%-24s %-8s %-28s %s\n", r.record_id.c_str(), score.c_str(),
                  list(r.missing_required).c_str(), list(r.missing_recommended).c_str());
    out << line;
  }
  out << "\ncompleteness: mean " << meta::detail::format_double(report.collection.mean)
      << ", min " << meta::detail::format_double(report.collection.min) << ", max "
      << meta::detail::format_double(report.collection.max) << "\nhistogram:";
  for (auto n : report.collection.histogram) out << ' ' << n;
  out << '\n';
  for (const auto& fc : report.consistency) {
    if (fc.consistent && fc.normalizable) continue;
    out << "field " << fc.field << ":";
    for (const auto& [canon, variants] : fc.classes)
      out << " " << canon << " <- {" << join(variants) << "}";
    out << '\n';
  }
  if (!report.findings.empty()) out << "\nfindings:\n";
  for (const auto& f : report.findings) {
    std::snprintf(line, sizeof line, "  %-8s %-20s %-16s %-12s %s\n",
                  std::string(to_string(f.severity)).c_str(), f.code.c_str(),
                  f.record_id.empty() ? "-" : f.record_id.c_str(),
                  f.field.empty() ? "-" : f.field.c_str(), f.message.c_str());
    out << line;
  }
  return out.str();
}

}  // namespace mga::quality
