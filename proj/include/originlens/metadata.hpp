// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "originlens/bytes.hpp"
#include "originlens/container.hpp"

namespace originlens {

enum class MetadataSource { Exif, Iptc, PngText };

const char* to_string(MetadataSource source);

struct MetadataRecord {
  MetadataSource source = MetadataSource::Exif;
  std::string key;
  std::string value;  // valid UTF-8
  bool operator==(const MetadataRecord&) const = default;
};

using MetadataRecordSet = std::vector<MetadataRecord>;

/// EXIF from an APP1 payload ("Exif\0\0" then a TIFF header). Decodes IFD0
/// and the Exif sub-IFD. Throws MalformedMetadata.
MetadataRecordSet parse_exif(ByteView app1_payload);

/// Same as parse_exif for a bare TIFF stream (PNG eXIf chunk).
MetadataRecordSet parse_tiff_metadata(ByteView tiff);

/// IPTC-IIM Caption/Abstract, Credit and Source from a Photoshop APP13
/// payload. A payload without the Photoshop signature yields no records.
/// Throws MalformedMetadata.
MetadataRecordSet parse_iptc(ByteView app13_payload);

/// tEXt, zTXt and iTXt chunks. Throws MalformedMetadata.
MetadataRecordSet parse_png_text(const std::vector<Chunk>& chunks);

enum class FieldScope { AnyText, ExifSoftware, ExifDescription, PngParameters, ClaimGenerator };

const char* to_string(FieldScope scope);

struct AiSignatureRule {
  std::string rule_id;
  FieldScope field_scope = FieldScope::AnyText;
  std::string pattern;  // case-insensitive substring
  std::string generator_name;
};

/// Parses the JSON rule-table format. Throws RuleTableError.
std::vector<AiSignatureRule> parse_rule_table(std::string_view json_text);
std::vector<AiSignatureRule> load_rule_table(const std::filesystem::path& path);
const std::vector<AiSignatureRule>& default_rule_table();
std::string_view default_rule_table_json();

struct AiMatch {
  std::string rule_id;
  std::string generator_name;
  MetadataSource matched_source = MetadataSource::Exif;
  std::string matched_key;
  std::string matched_excerpt;  // at most kMaxExcerpt bytes, a substring of the value
};

inline constexpr std::size_t kMaxExcerpt = 80;

/// Whether a metadata record falls inside a rule's scope. IPTC records are
/// never in scope, and ClaimGenerator rules apply only to manifests.
bool scope_covers(FieldScope scope, const MetadataRecord& record);

/// Case-insensitive (ASCII) substring search; npos when absent.
std::size_t find_case_insensitive(std::string_view haystack, std::string_view needle);

/// Excerpt of at most kMaxExcerpt bytes around [pos, pos + len), trimmed to
/// UTF-8 boundaries.
std::string excerpt_around(std::string_view value, std::size_t pos, std::size_t len);

/// Every (record, rule) match, in record order then rule order.
std::vector<AiMatch> detect_ai_signatures(const MetadataRecordSet& records,
                                          const std::vector<AiSignatureRule>& rules);

}  // namespace originlens
