// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>

#include "json.hpp"
#include "originlens/verdict.hpp"
#include "support.hpp"

namespace originlens {
namespace {

using testing::DecisionCell;
using testing::evidence_for;

DecisionCell cell(std::string manifest, std::string metadata, std::string watermark, std::string context) {
  return {std::move(manifest), std::move(metadata), std::move(watermark), std::move(context), "", "", ""};
}

Verdict decide_cell(const DecisionCell& c) {
  const auto evidence = evidence_for(c);
  return decide(evidence);
}

TEST(Decide, DecisionTableCoversEveryCell) {
  const auto table = testing::load_decision_table();
  ASSERT_EQ(table.size(), 126u);
  for (const auto& row : table) {
    const Verdict v = decide_cell(row);
    const std::string where = row.manifest + "/" + row.metadata + "/" + row.watermark + "/" + row.context;
    EXPECT_EQ(to_string(v.status), row.status) << where;
    EXPECT_EQ(to_string(v.color), row.color) << where;
    EXPECT_EQ(to_string(v.confidence), row.confidence) << where;
    EXPECT_FALSE(v.reasons.empty()) << where;
  }
}

TEST(Decide, ValidTrustedNoAiIsVerifiedGreenHigh) {
  const Verdict v = decide_cell(cell("valid_plain", "none", "skipped", "skipped"));
  EXPECT_EQ(v.status, Status::Verified);
  EXPECT_EQ(v.color, Color::Green);
  EXPECT_EQ(v.confidence, Confidence::High);
}

TEST(Decide, BindingMismatchIsInvalidRed) {
  const Verdict v = decide_cell(cell("invalid_binding", "none", "skipped", "skipped"));
  EXPECT_EQ(v.status, Status::Invalid);
  EXPECT_EQ(v.color, Color::Red);
  EXPECT_NE(v.reasons.front().find("hard binding"), std::string::npos);
}

TEST(Decide, NoManifestStableDiffusionIsPurpleMedium) {
  const Verdict v = decide_cell(cell("absent", "ai", "skipped", "skipped"));
  EXPECT_EQ(v.status, Status::AIGenerated);
  EXPECT_EQ(v.color, Color::Purple);
  EXPECT_EQ(v.confidence, Confidence::Medium);
}

TEST(Decide, NoSignalsAllLayersRunIsGrayNone) {
  const Verdict v = decide_cell(cell("absent", "none", "none", "none"));
  EXPECT_EQ(v.status, Status::NoData);
  EXPECT_EQ(v.color, Color::Gray);
  EXPECT_EQ(v.confidence, Confidence::None);
}

TEST(Decide, InvalidOutranksGenerativeOrigin) {
  for (const char* broken : {"invalid_binding", "invalid_sig"}) {
    auto evidence = evidence_for(cell(broken, "ai", "detected", "hits"));
    std::get<ProvenanceFacts>(evidence[0].facts).generator = "Adobe Firefly";
    EXPECT_EQ(decide(evidence).status, Status::Invalid) << broken;
  }
}

TEST(Decide, BrokenChainStatusesAreInvalid) {
  for (auto status : {ChainStatus::Untrusted, ChainStatus::Revoked, ChainStatus::PinMismatch}) {
    auto evidence = evidence_for(cell("valid_plain", "none", "skipped", "skipped"));
    std::get<ProvenanceFacts>(evidence[0].facts).chain->status = status;
    EXPECT_EQ(decide(evidence).status, Status::Invalid) << to_string(status);
  }
}

TEST(Decide, MalformedChainWithValidSignatureIsWarning) {
  auto evidence = evidence_for(cell("valid_plain", "none", "skipped", "skipped"));
  std::get<ProvenanceFacts>(evidence[0].facts).chain->status = ChainStatus::Malformed;
  EXPECT_EQ(decide(evidence).status, Status::Warning);
}

TEST(Decide, FailedAssertionDigestIsWarning) {
  auto evidence = evidence_for(cell("valid_ai", "none", "skipped", "skipped"));
  std::get<ProvenanceFacts>(evidence[0].facts).assertions[0].digest_ok = false;
  const Verdict v = decide(evidence);
  EXPECT_EQ(v.status, Status::Warning);
  EXPECT_EQ(v.color, Color::Orange);
}

TEST(Decide, MissingHardBindingIsWarning) {
  auto evidence = evidence_for(cell("valid_plain", "none", "skipped", "skipped"));
  std::get<ProvenanceFacts>(evidence[0].facts).binding.reset();
  EXPECT_EQ(decide(evidence).status, Status::Warning);
}

TEST(Decide, WatermarkOnValidPlainManifestStaysVerified) {
  const Verdict v = decide_cell(cell("valid_plain", "none", "detected", "skipped"));
  EXPECT_EQ(v.status, Status::Verified);
  EXPECT_TRUE(std::any_of(v.reasons.begin(), v.reasons.end(),
                          [](const std::string& r) { return r.find("watermark detected") != std::string::npos; }));
}

TEST(Decide, UnexecutedLayersIgnored) {
  auto evidence = evidence_for(cell("absent", "ai", "skipped", "skipped"));
  evidence[1].executed = false;
  EXPECT_EQ(decide(evidence).status, Status::NoData);
  evidence[0].executed = false;
  evidence[1].executed = true;
  const Verdict v = decide(evidence);
  EXPECT_EQ(v.status, Status::AIGenerated);
  EXPECT_EQ(v.reasons.front(), "provenance layer did not run");
}

TEST(Decide, TransportFailureReadsAsUnavailable) {
  auto evidence = evidence_for(cell("absent", "none", "skipped", "skipped"));
  evidence[2] = {Layer::Watermark, true, {}, WatermarkOutcome{TransportFailure{"timed out"}}};
  const Verdict v = decide(evidence);
  EXPECT_EQ(v.status, Status::NoData);
  EXPECT_EQ(v.confidence, Confidence::None);
  EXPECT_NE(std::find(v.reasons.begin(), v.reasons.end(), "watermark check unavailable: timed out"), v.reasons.end());
}

TEST(Decide, ReasonsCiteMetadataExcerpt) {
  const Verdict v = decide_cell(cell("absent", "ai", "skipped", "skipped"));
  EXPECT_TRUE(std::any_of(v.reasons.begin(), v.reasons.end(), [](const std::string& r) {
    return r.find("Stable Diffusion XL") != std::string::npos && r.find("stable-diffusion") != std::string::npos;
  }));
}

TEST(ColorOf, FixedMapping) {
  EXPECT_EQ(color_of(Status::Verified), Color::Green);
  EXPECT_EQ(color_of(Status::AIGenerated), Color::Purple);
  EXPECT_EQ(color_of(Status::Warning), Color::Orange);
  EXPECT_EQ(color_of(Status::Invalid), Color::Red);
  EXPECT_EQ(color_of(Status::NoData), Color::Gray);
}

// Property: every ordering of the evidence list gives the same verdict.
TEST(DecideProperty, PermutationInvariant) {
  for (const auto& row : testing::load_decision_table()) {
    auto evidence = evidence_for(row);
    std::sort(evidence.begin(), evidence.end(),
              [](const LayerEvidence& a, const LayerEvidence& b) { return a.layer < b.layer; });
    const Verdict reference = decide(evidence);
    while (std::next_permutation(evidence.begin(), evidence.end(), [](const LayerEvidence& a, const LayerEvidence& b) {
      return a.layer < b.layer;
    })) {
      ASSERT_EQ(decide(evidence), reference) << row.manifest;
    }
  }
}

// Property: network layers never lift confidence above Medium and never
// change a status decided by a present manifest.
TEST(DecideProperty, NetworkLayersMonotone) {
  for (const auto& row : testing::load_decision_table()) {
    const Verdict with_network = decide_cell(row);
    const Verdict offline = decide_cell(cell(row.manifest, row.metadata, "skipped", "skipped"));
    if (row.manifest != "absent") {
      EXPECT_EQ(with_network.status, offline.status) << row.manifest;
      EXPECT_EQ(with_network.confidence, offline.confidence) << row.manifest;
    } else {
      EXPECT_NE(with_network.confidence, Confidence::High);
      if (offline.status == Status::AIGenerated) {
        EXPECT_EQ(with_network.status, Status::AIGenerated);
      }
    }
  }
}

// Property: High confidence only with a verified claim signature.
TEST(DecideProperty, HighRequiresVerifiedSignature) {
  for (const auto& row : testing::load_decision_table()) {
    const auto evidence = evidence_for(row);
    if (decide(evidence).confidence != Confidence::High) continue;
    const auto& p = std::get<ProvenanceFacts>(evidence[0].facts);
    EXPECT_TRUE(p.manifest_present && !p.parse_error && p.signature_valid.value_or(false)) << row.manifest;
  }
}

Report sample_report() {
  Report r;
  r.layers = evidence_for(cell("valid_plain", "none", "skipped", "skipped"));
  r.verdict = decide(r.layers);
  r.timings_ms[0] = 4.25;
  r.timings_ms[1] = 0.5;
  r.input_digest = sha256(as_bytes("input"));
  EditHistoryEntry first;
  first.manifest_label = "urn:uuid:first";
  first.claim_generator = "Camera 1";
  first.timestamp = parse_rfc3339("2025-06-01T00:00:00Z");
  first.action = "c2pa.created";
  EditHistoryEntry second;
  second.manifest_label = "urn:uuid:second";
  second.claim_generator = "Editor 2";
  second.action = "c2pa.edited";
  second.ingredient_digest = sha256(as_bytes("first"));
  r.edit_history = {first, second};
  return r;
}

TEST(RenderReport, JsonSchemaFields) {
  const Report r = sample_report();
  const auto doc = nlohmann::json::parse(render_report(r, RenderMode::Json));
  EXPECT_EQ(doc["schema"], "origin-lens/1");
  EXPECT_EQ(doc["status"], "verified");
  EXPECT_EQ(doc["color"], "green");
  EXPECT_EQ(doc["confidence"], "high");
  EXPECT_EQ(doc["input_sha256"], to_hex(r.input_digest));
  ASSERT_EQ(doc["layers"].size(), 4u);
  EXPECT_EQ(doc["layers"][0]["layer"], "provenance");
  EXPECT_EQ(doc["layers"][0]["timing_ms"], 4.25);
  EXPECT_EQ(doc["layers"][2]["executed"], false);
  EXPECT_TRUE(doc["layers"][2]["timing_ms"].is_null());
  EXPECT_EQ(doc["reasons"].size(), r.verdict.reasons.size());
}

TEST(RenderReport, HistoryOrderPreserved) {
  const auto doc = nlohmann::json::parse(render_report(sample_report(), RenderMode::Json));
  ASSERT_EQ(doc["edit_history"].size(), 2u);
  EXPECT_EQ(doc["edit_history"][0]["manifest_label"], "urn:uuid:first");
  EXPECT_EQ(doc["edit_history"][0]["timestamp"], "2025-06-01T00:00:00Z");
  EXPECT_TRUE(doc["edit_history"][0]["ingredient_digest"].is_null());
  EXPECT_EQ(doc["edit_history"][1]["manifest_label"], "urn:uuid:second");
  EXPECT_TRUE(doc["edit_history"][1]["timestamp"].is_null());
  EXPECT_EQ(doc["edit_history"][1]["ingredient_digest"], to_hex(sha256(as_bytes("first"))));
}

TEST(RenderReport, ByteStable) {
  const Report r = sample_report();
  EXPECT_EQ(render_report(r, RenderMode::Json), render_report(sample_report(), RenderMode::Json));
  EXPECT_EQ(render_report(r, RenderMode::Human), render_report(r, RenderMode::Human));
}

TEST(RenderReport, HumanMode) {
  const std::string plain = render_report(sample_report(), RenderMode::Human);
  EXPECT_NE(plain.find("status: Verified (green)"), std::string::npos);
  EXPECT_NE(plain.find("confidence: high"), std::string::npos);
  EXPECT_LT(plain.find("urn:uuid:first"), plain.find("urn:uuid:second"));
  EXPECT_NE(plain.find("watermark: not run"), std::string::npos);
  EXPECT_EQ(plain.find('\033'), std::string::npos);
  const std::string colored = render_report(sample_report(), RenderMode::Human, true);
  EXPECT_NE(colored.find("\033[32m"), std::string::npos);
}

}  // namespace
}  // namespace originlens
