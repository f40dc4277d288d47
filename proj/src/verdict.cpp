// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#include "originlens/verdict.hpp"

#include <algorithm>
#include <cstdio>

namespace originlens {

namespace {

template <typename T>
const T* facts_for(std::span<const LayerEvidence> evidence, Layer layer) {
  for (const auto& e : evidence) {
    if (e.layer == layer && e.executed) return std::get_if<T>(&e.facts);
  }
  return nullptr;
}

bool chain_broken(const ProvenanceFacts& p) {
  if (!p.chain) return false;
  switch (p.chain->status) {
    case ChainStatus::Untrusted:
    case ChainStatus::Revoked:
    case ChainStatus::PinMismatch:
      return true;
    default:
      return false;
  }
}

std::string describe_chain(const ChainResult& chain) {
  std::string s = std::string("certificate chain ") + to_string(chain.status);
  if (!chain.leaf_subject.empty()) s += " (signer " + chain.leaf_subject + ")";
  if (!chain.problems.empty()) s += ": " + chain.problems.front();
  return s;
}

std::string format_confidence(double c) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", c);
  return buf;
}

void provenance_reasons(const ProvenanceFacts& p, std::vector<std::string>& out) {
  if (!p.manifest_present) {
    out.push_back("no provenance manifest found");
    return;
  }
  if (p.parse_error) {
    out.push_back("provenance manifest could not be parsed: " + *p.parse_error);
    return;
  }
  if (p.binding && p.binding->result == BindingResult::Mismatch) {
    out.push_back("content does not match the hard binding" + (p.binding->note.empty() ? "" : ": " + p.binding->note));
  }
  if (p.signature_valid && !*p.signature_valid) out.push_back("claim signature does not verify");
  if (p.chain) out.push_back(describe_chain(*p.chain));
  if (p.signature_valid && *p.signature_valid) out.push_back("claim signature verified");
  if (!p.binding) out.push_back("manifest carries no usable hard binding");
  if (p.binding && p.binding->result == BindingResult::Match) out.push_back("content hash matches the hard binding");
  for (const auto& a : p.assertions) {
    if (!a.digest_ok) out.push_back("assertion " + a.label + " fails its digest check");
  }
  if (p.generator) out.push_back("manifest declares generative origin: " + *p.generator);
}

void metadata_reasons(const MetadataFacts& m, std::vector<std::string>& out) {
  for (const auto& match : m.matches) {
    out.push_back(std::string("metadata ") + to_string(match.matched_source) + " " + match.matched_key +
                  " indicates " + match.generator_name + " (rule " + match.rule_id + "): \"" +
                  match.matched_excerpt + "\"");
  }
}

void watermark_reasons(const WatermarkOutcome& w, std::vector<std::string>& out) {
  if (const auto* r = std::get_if<WatermarkResult>(&w)) {
    if (r->detected) {
      std::string s = "watermark detected";
      if (!r->watermark_kind.empty()) s += ": " + r->watermark_kind;
      if (r->provider_confidence) s += " (provider confidence " + format_confidence(*r->provider_confidence) + ")";
      out.push_back(std::move(s));
    } else {
      out.push_back("no watermark detected");
    }
  } else if (const auto* f = std::get_if<TransportFailure>(&w)) {
    out.push_back("watermark check unavailable: " + f->message);
  }
}

void context_reasons(const SearchOutcome& s, std::vector<std::string>& out) {
  if (const auto* hits = std::get_if<std::vector<ReverseSearchHit>>(&s)) {
    if (hits->empty()) {
      out.push_back("reverse search found no prior copies");
      return;
    }
    const auto& first = hits->front();
    std::string r = "reverse search found " + std::to_string(hits->size()) + " prior cop" +
                    (hits->size() == 1 ? "y" : "ies") + "; earliest " + first.url;
    if (first.first_seen) r += " (" + format_rfc3339(*first.first_seen).substr(0, 10) + ")";
    out.push_back(std::move(r));
  } else if (const auto* f = std::get_if<TransportFailure>(&s)) {
    out.push_back("reverse search unavailable: " + f->message);
  }
}

}  // namespace

const char* to_string(Layer layer) {
  switch (layer) {
    case Layer::Provenance: return "provenance";
    case Layer::Metadata: return "metadata";
    case Layer::Watermark: return "watermark";
    case Layer::Context: return "context";
  }
  return "unknown";
}

const char* to_string(Status status) {
  switch (status) {
    case Status::Verified: return "verified";
    case Status::AIGenerated: return "ai_generated";
    case Status::Warning: return "warning";
    case Status::Invalid: return "invalid";
    case Status::NoData: return "no_data";
  }
  return "unknown";
}

const char* to_string(Color color) {
  switch (color) {
    case Color::Green: return "green";
    case Color::Purple: return "purple";
    case Color::Orange: return "orange";
    case Color::Red: return "red";
    case Color::Gray: return "gray";
  }
  return "unknown";
}

const char* to_string(Confidence confidence) {
  switch (confidence) {
    case Confidence::High: return "high";
    case Confidence::Medium: return "medium";
    case Confidence::Low: return "low";
    case Confidence::None: return "none";
  }
  return "unknown";
}

Verdict decide(std::span<const LayerEvidence> evidence) {
  const auto* prov = facts_for<ProvenanceFacts>(evidence, Layer::Provenance);
  const auto* meta = facts_for<MetadataFacts>(evidence, Layer::Metadata);
  const auto* mark = facts_for<WatermarkOutcome>(evidence, Layer::Watermark);
  const auto* ctx = facts_for<SearchOutcome>(evidence, Layer::Context);

  Verdict v;
  if (prov && prov->manifest_present) {
    if (prov->parse_error) {
      v.status = Status::Warning;
      v.confidence = Confidence::Low;
    } else {
      const bool sig_ok = prov->signature_valid.value_or(false);
      const bool mismatch = prov->binding && prov->binding->result == BindingResult::Mismatch;
      if (mismatch || chain_broken(*prov) || !sig_ok) {
        v.status = Status::Invalid;
        v.confidence = sig_ok ? Confidence::High : Confidence::Medium;
      } else {
        const bool trusted = prov->chain && prov->chain->status == ChainStatus::Trusted;
        const bool bound = prov->binding && prov->binding->result == BindingResult::Match;
        const bool digests_ok = std::all_of(prov->assertions.begin(), prov->assertions.end(),
                                            [](const AssertionCheck& a) { return a.digest_ok; });
        if (trusted && bound && digests_ok) {
          v.status = prov->generator ? Status::AIGenerated : Status::Verified;
        } else {
          v.status = Status::Warning;
        }
        v.confidence = Confidence::High;
      }
    }
  } else {
    const bool ai_metadata = meta && !meta->matches.empty();
    const auto* mark_result = mark ? std::get_if<WatermarkResult>(mark) : nullptr;
    const bool watermark = mark_result && mark_result->detected;
    const auto* hits = ctx ? std::get_if<std::vector<ReverseSearchHit>>(ctx) : nullptr;
    if (ai_metadata || watermark) {
      v.status = Status::AIGenerated;
      v.confidence = Confidence::Medium;
    } else if (hits && !hits->empty()) {
      v.status = Status::NoData;
      v.confidence = Confidence::Low;
    } else {
      v.status = Status::NoData;
      v.confidence = Confidence::None;
    }
  }
  v.color = color_of(v.status);

  if (prov) {
    provenance_reasons(*prov, v.reasons);
  } else {
    v.reasons.push_back("provenance layer did not run");
  }
  if (meta) metadata_reasons(*meta, v.reasons);
  if (mark) watermark_reasons(*mark, v.reasons);
  if (ctx) context_reasons(*ctx, v.reasons);
  return v;
}

}  // namespace originlens
