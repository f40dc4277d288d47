// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "originlens/errors.hpp"
#include "originlens/metadata.hpp"

namespace originlens {

namespace {

FieldScope parse_scope(const std::string& s) {
  if (s == "AnyText") return FieldScope::AnyText;
  if (s == "ExifSoftware") return FieldScope::ExifSoftware;
  if (s == "ExifDescription") return FieldScope::ExifDescription;
  if (s == "PngParameters") return FieldScope::PngParameters;
  if (s == "ClaimGenerator") return FieldScope::ClaimGenerator;
  throw RuleTableError("unknown field_scope '" + s + "'");
}

char fold(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

bool equals_ci(std::string_view a, std::string_view b) {
  return a.size() == b.size() && find_case_insensitive(a, b) == 0;
}

bool continuation(char c) { return (static_cast<unsigned char>(c) & 0xC0) == 0x80; }

}  // namespace

const char* to_string(FieldScope scope) {
  switch (scope) {
    case FieldScope::AnyText: return "AnyText";
    case FieldScope::ExifSoftware: return "ExifSoftware";
    case FieldScope::ExifDescription: return "ExifDescription";
    case FieldScope::PngParameters: return "PngParameters";
    case FieldScope::ClaimGenerator: return "ClaimGenerator";
  }
  return "unknown";
}

std::vector<AiSignatureRule> parse_rule_table(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw RuleTableError(std::string("rule table is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw RuleTableError("rule table must be a JSON array");
  std::vector<AiSignatureRule> rules;
  std::set<std::string> ids;
  for (const auto& entry : doc) {
    if (!entry.is_object()) throw RuleTableError("rule entry must be an object");
    auto text = [&](const char* key) {
      auto it = entry.find(key);
      if (it == entry.end() || !it->is_string()) throw RuleTableError(std::string("rule lacks string '") + key + "'");
      return it->get<std::string>();
    };
    AiSignatureRule rule;
    rule.rule_id = text("rule_id");
    rule.field_scope = parse_scope(text("field_scope"));
    rule.pattern = text("pattern");
    rule.generator_name = text("generator_name");
    if (rule.rule_id.empty()) throw RuleTableError("empty rule_id");
    if (rule.pattern.empty()) throw RuleTableError("rule '" + rule.rule_id + "' has an empty pattern");
    if (!ids.insert(rule.rule_id).second) throw RuleTableError("duplicate rule_id '" + rule.rule_id + "'");
    rules.push_back(std::move(rule));
  }
  return rules;
}

std::vector<AiSignatureRule> load_rule_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuleTableError("cannot read rule table " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_rule_table(ss.str());
}

const std::vector<AiSignatureRule>& default_rule_table() {
  static const std::vector<AiSignatureRule> rules = parse_rule_table(default_rule_table_json());
  return rules;
}

bool scope_covers(FieldScope scope, const MetadataRecord& record) {
  switch (scope) {
    case FieldScope::AnyText:
      return record.source != MetadataSource::Iptc;
    case FieldScope::ExifSoftware:
      return record.source == MetadataSource::Exif && record.key == "Software";
    case FieldScope::ExifDescription:
      return record.source == MetadataSource::Exif &&
             (record.key == "ImageDescription" || record.key == "UserComment");
    case FieldScope::PngParameters:
      return record.source == MetadataSource::PngText && equals_ci(record.key, "parameters");
    case FieldScope::ClaimGenerator:
      return false;
  }
  return false;
}

std::size_t find_case_insensitive(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return 0;
  if (needle.size() > haystack.size()) return std::string_view::npos;
  for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    std::size_t j = 0;
    while (j < needle.size() && fold(haystack[i + j]) == fold(needle[j])) ++j;
    if (j == needle.size()) return i;
  }
  return std::string_view::npos;
}

std::string excerpt_around(std::string_view value, std::size_t pos, std::size_t len) {
  pos = std::min(pos, value.size());
  len = std::min(len, value.size() - pos);
  std::size_t start = pos;
  if (len < kMaxExcerpt) start = pos - std::min(pos, (kMaxExcerpt - len) / 2);
  std::size_t end = std::min(value.size(), start + kMaxExcerpt);
  if (end - start < kMaxExcerpt) start = end > kMaxExcerpt ? end - kMaxExcerpt : 0;
  while (start < end && continuation(value[start])) ++start;
  while (end > start && end < value.size() && continuation(value[end])) --end;
  return std::string(value.substr(start, end - start));
}

std::vector<AiMatch> detect_ai_signatures(const MetadataRecordSet& records,
                                          const std::vector<AiSignatureRule>& rules) {
  std::vector<AiMatch> out;
  for (const auto& record : records) {
    for (const auto& rule : rules) {
      if (!scope_covers(rule.field_scope, record)) continue;
      const auto pos = find_case_insensitive(record.value, rule.pattern);
      if (pos == std::string_view::npos) continue;
      out.push_back({rule.rule_id, rule.generator_name, record.source, record.key,
                     excerpt_around(record.value, pos, rule.pattern.size())});
    }
  }
  return out;
}

}  // namespace originlens
