// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "originlens/crypto_trust.hpp"
#include "originlens/manifest.hpp"
#include "originlens/metadata.hpp"
#include "originlens/netlayers.hpp"

namespace originlens {

enum class Layer { Provenance = 0, Metadata = 1, Watermark = 2, Context = 3 };
inline constexpr std::size_t kLayerCount = 4;

enum class Status { Verified, AIGenerated, Warning, Invalid, NoData };
enum class Color { Green, Purple, Orange, Red, Gray };
enum class Confidence { High, Medium, Low, None };

const char* to_string(Layer layer);
const char* to_string(Status status);
const char* to_string(Color color);
const char* to_string(Confidence confidence);

constexpr Color color_of(Status status) {
  switch (status) {
    case Status::Verified: return Color::Green;
    case Status::AIGenerated: return Color::Purple;
    case Status::Warning: return Color::Orange;
    case Status::Invalid: return Color::Red;
    case Status::NoData: return Color::Gray;
  }
  return Color::Gray;
}

struct ProvenanceFacts {
  bool manifest_present = false;
  std::optional<std::string> parse_error;
  std::string active_label;
  std::string claim_generator;
  std::optional<ChainResult> chain;
  std::optional<bool> signature_valid;
  std::optional<BindingCheck> binding;  // nullopt: no usable hard binding
  std::vector<AssertionCheck> assertions;
  std::optional<std::string> generator;
};

struct MetadataFacts {
  MetadataRecordSet records;
  std::vector<AiMatch> matches;
  std::vector<std::string> errors;
  std::optional<double> exif_parse_ms;  // wall time of the EXIF decode alone
};

struct LayerEvidence {
  Layer layer = Layer::Provenance;
  bool executed = false;
  std::vector<std::string> findings;
  std::variant<std::monostate, ProvenanceFacts, MetadataFacts, WatermarkOutcome, SearchOutcome> facts;
};

struct Verdict {
  Status status = Status::NoData;
  Color color = Color::Gray;
  Confidence confidence = Confidence::None;
  std::vector<std::string> reasons;
  bool operator==(const Verdict&) const = default;
};

/// Total and order-independent: evidence is looked up by layer. Missing
/// layers count as not executed.
Verdict decide(std::span<const LayerEvidence> evidence);

struct Report {
  Verdict verdict;
  std::vector<LayerEvidence> layers;  // layer order
  std::vector<EditHistoryEntry> edit_history;
  std::array<std::optional<double>, kLayerCount> timings_ms{};
  Digest256 input_digest{};
};

enum class RenderMode { Human, Json };

/// JSON output follows the "origin-lens/1" schema. `ansi` colours the status
/// line in Human mode.
std::string render_report(const Report& report, RenderMode mode, bool ansi = false);

inline constexpr char kReportSchema[] = "origin-lens/1";

}  // namespace originlens
