// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#include "originlens/pipeline.hpp"

#include <atomic>
#include <condition_variable>
#include <cstring>
#include <fstream>
#include <mutex>
#include <thread>

#include "originlens/errors.hpp"

namespace originlens {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  const auto d = std::chrono::duration<double, std::milli>(Clock::now() - since).count();
  return d > 0.0 ? d : 1e-6;  // executed layers always report a positive time
}

std::optional<JumbfCarrier> locate_carrier(const ImageBytes& image, std::vector<std::string>& findings) {
  if (image.format() != ImageFormat::Unknown) {
    try {
      if (auto carrier = extract_jumbf(image)) return carrier;
    } catch (const MalformedContainer& e) {
      findings.push_back(std::string("container structure is damaged: ") + e.what());
    }
  } else {
    findings.push_back("unrecognized container format");
  }
  // A damaged or reshaped container may still hold the original carrier.
  auto carrier = salvage_jumbf(image.bytes());
  if (carrier) findings.push_back("provenance carrier recovered by signature search");
  return carrier;
}

struct ProvenanceOutput {
  LayerEvidence evidence;
  std::vector<EditHistoryEntry> history;
};

ProvenanceOutput run_provenance(const ImageBytes& image, const TrustStore& trust,
                                const std::vector<AiSignatureRule>& rules, UtcTime now) {
  ProvenanceOutput out;
  auto& ev = out.evidence;
  ev.layer = Layer::Provenance;
  ev.executed = true;
  ProvenanceFacts facts;

  auto carrier = locate_carrier(image, ev.findings);
  if (!carrier) {
    ev.findings.push_back("no provenance manifest found");
    ev.facts = std::move(facts);
    return out;
  }
  facts.manifest_present = true;
  ManifestStore store;
  try {
    store = parse_manifest_store(jumbf::parse_box_tree(carrier->jumbf));
  } catch (const Error& e) {
    facts.parse_error = e.what();
    ev.findings.push_back(std::string("manifest store unreadable: ") + e.what());
    ev.facts = std::move(facts);
    return out;
  }

  const Manifest& active = store.active();
  facts.active_label = active.label;
  facts.claim_generator = active.claim.claim_generator;
  ev.findings.push_back("active manifest " + active.label + " from " + active.claim.claim_generator);
  ev.findings.push_back(std::to_string(store.manifests.size()) + " manifest(s) in store");

  facts.assertions = resolve_assertions(active);
  std::size_t ok = 0;
  for (const auto& a : facts.assertions) ok += a.digest_ok ? 1 : 0;
  ev.findings.push_back(std::to_string(ok) + "/" + std::to_string(facts.assertions.size()) +
                        " assertion digests match");

  facts.chain = verify_chain(active.signature.cert_chain, trust, now);
  ev.findings.push_back(std::string("certificate chain: ") + to_string(facts.chain->status) +
                        (facts.chain->leaf_subject.empty() ? "" : " (" + facts.chain->leaf_subject + ")"));
  for (const auto& p : facts.chain->problems) ev.findings.push_back("chain: " + p);

  try {
    facts.signature_valid = verify_claim_signature(active.signature, active.claim_bytes);
    ev.findings.push_back(std::string("signature (") + active.signature.algorithm_name + "): " +
                          (*facts.signature_valid ? "valid" : "invalid"));
  } catch (const UnsupportedAlgorithm& e) {
    facts.signature_valid = false;
    ev.findings.push_back(std::string("signature not checkable: ") + e.what());
  }

  if (active.hard_binding) {
    facts.binding = verify_hard_binding(*active.hard_binding, image);
    ev.findings.push_back(std::string("hard binding: ") +
                          (facts.binding->result == BindingResult::Match ? "match" : "mismatch"));
  } else if (!active.hard_binding_error.empty()) {
    ev.findings.push_back("hard binding unusable: " + active.hard_binding_error);
  } else {
    ev.findings.push_back("hard binding absent");
  }

  facts.generator = classify_generative_origin(active, rules);
  if (facts.generator) ev.findings.push_back("generative origin: " + *facts.generator);

  out.history = extract_edit_history(store);
  ev.facts = std::move(facts);
  return out;
}

LayerEvidence run_metadata(const ImageBytes& image, const std::vector<AiSignatureRule>& rules) {
  LayerEvidence ev;
  ev.layer = Layer::Metadata;
  ev.executed = true;
  MetadataFacts facts;

  auto guarded = [&](const char* what, auto&& parse) {
    try {
      auto recs = parse();
      facts.records.insert(facts.records.end(), recs.begin(), recs.end());
    } catch (const Error& e) {
      facts.errors.push_back(std::string(what) + ": " + e.what());
    }
  };
  auto timed_exif = [&](ByteView tiff, bool with_header) {
    const auto start = Clock::now();
    guarded("EXIF", [&] { return with_header ? parse_exif(tiff) : parse_tiff_metadata(tiff); });
    facts.exif_parse_ms = facts.exif_parse_ms.value_or(0.0) + elapsed_ms(start);
  };

  try {
    if (image.format() == ImageFormat::Jpeg) {
      static constexpr std::string_view kExifId("Exif\0\0", 6);
      for (const auto& seg : scan_jpeg_segments(image)) {
        if (seg.marker == jpeg::kApp1 && seg.payload.size() >= kExifId.size() &&
            std::memcmp(seg.payload.data(), kExifId.data(), kExifId.size()) == 0) {
          timed_exif(seg.payload, true);
        } else if (seg.marker == jpeg::kApp13) {
          guarded("IPTC", [&] { return parse_iptc(seg.payload); });
        }
      }
    } else if (image.format() == ImageFormat::Png) {
      auto chunks = scan_png_chunks(image);
      guarded("PNG text", [&] { return parse_png_text(chunks); });
      for (const auto& c : chunks) {
        if (c.type_code == "eXIf") timed_exif(c.payload, false);
      }
    } else {
      ev.findings.push_back("unrecognized container; no metadata read");
    }
  } catch (const Error& e) {
    facts.errors.push_back(std::string("container: ") + e.what());
  }

  facts.matches = detect_ai_signatures(facts.records, rules);
  ev.findings.push_back(std::to_string(facts.records.size()) + " metadata record(s)");
  for (const auto& r : facts.records) {
    std::string value = r.value.size() > kMaxExcerpt ? excerpt_around(r.value, 0, 0) + "..." : r.value;
    ev.findings.push_back(std::string(to_string(r.source)) + " " + r.key + " = " + value);
  }
  for (const auto& m : facts.matches) {
    ev.findings.push_back("AI signature " + m.rule_id + " matched " + m.matched_key + " (" + m.generator_name + ")");
  }
  for (const auto& e : facts.errors) ev.findings.push_back("parse error: " + e);
  ev.facts = std::move(facts);
  return ev;
}

// Network layers run on detached threads so a stalled transport cannot hold
// the pipeline past its deadline. The shared state outlives the call.
struct NetState {
  std::mutex mu;
  std::condition_variable cv;
  int pending = 0;
  std::atomic<bool> cancelled{false};
  std::optional<WatermarkOutcome> watermark;
  std::optional<SearchOutcome> search;
  std::optional<double> watermark_ms;
  std::optional<double> search_ms;
};

}  // namespace

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UnreadableInput("cannot open " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw UnreadableInput("cannot read " + path.string());
  return data;
}

Engine Engine::from_config(const EngineConfig& config, std::shared_ptr<Transport> transport) {
  const std::filesystem::path* pins = config.pin_list_path ? &*config.pin_list_path : nullptr;
  const std::filesystem::path* crl = config.revocation_list_path ? &*config.revocation_list_path : nullptr;
  TrustStore trust = TrustStore::load(config.trust_store_paths, pins, crl);
  auto rules = config.rule_table_path ? load_rule_table(*config.rule_table_path) : default_rule_table();
  return Engine(std::move(trust), std::move(rules), config, std::move(transport));
}

Engine::Engine(TrustStore trust, std::vector<AiSignatureRule> rules, EngineConfig config,
               std::shared_ptr<Transport> transport)
    : trust_(std::move(trust)), rules_(std::move(rules)), config_(std::move(config)), transport_(std::move(transport)) {
  if (trust_.empty()) warnings_.push_back("trust store is empty; every signer will be reported untrusted");
  const auto& net = config_.net_policy;
  if (!transport_ && (net.watermark_enabled || net.reverse_search_enabled)) {
    transport_ = std::make_shared<HttpTransport>();
  }
}

Report Engine::analyze(const ImageBytes& image) const {
  if (image.empty()) throw UnreadableInput("input is empty");
  const auto started = Clock::now();
  const UtcTime now = config_.clock_override.value_or(utc_now());

  Report report;
  report.input_digest = sha256(image.bytes());

  auto t = Clock::now();
  auto prov = run_provenance(image, trust_, rules_, now);
  report.timings_ms[0] = elapsed_ms(t);
  report.edit_history = std::move(prov.history);
  report.layers.push_back(std::move(prov.evidence));

  t = Clock::now();
  report.layers.push_back(run_metadata(image, rules_));
  report.timings_ms[1] = elapsed_ms(t);

  const NetPolicy& net = config_.net_policy;
  LayerEvidence watermark{Layer::Watermark, false, {}, {}};
  LayerEvidence context{Layer::Context, false, {}, {}};
  if ((net.watermark_enabled || net.reverse_search_enabled) && transport_) {
    auto state = std::make_shared<NetState>();
    auto transport = transport_;
    if (net.watermark_enabled) {
      state->pending++;
      std::thread([state, transport, image, net] {
        const auto t0 = Clock::now();
        auto result = check_watermark(image, net, *transport);
        std::lock_guard lock(state->mu);
        if (!state->cancelled) {
          state->watermark = std::move(result);
          state->watermark_ms = elapsed_ms(t0);
        }
        state->pending--;
        state->cv.notify_all();
      }).detach();
    }
    if (net.reverse_search_enabled) {
      state->pending++;
      std::thread([state, transport, image, net] {
        const auto t0 = Clock::now();
        auto result = reverse_search(image, net, *transport);
        std::lock_guard lock(state->mu);
        if (!state->cancelled) {
          state->search = std::move(result);
          state->search_ms = elapsed_ms(t0);
        }
        state->pending--;
        state->cv.notify_all();
      }).detach();
    }
    const auto layer_deadline = Clock::now() + net.timeout + std::chrono::seconds(1);
    const auto deadline = std::min(layer_deadline, started + config_.pipeline_deadline);
    std::unique_lock lock(state->mu);
    state->cv.wait_until(lock, deadline, [&] { return state->pending == 0; });
    state->cancelled = true;

    const double waited = elapsed_ms(t);
    if (net.watermark_enabled) {
      watermark.executed = true;
      watermark.facts = state->watermark.value_or(TransportFailure{"deadline exceeded"});
      report.timings_ms[2] = state->watermark_ms.value_or(waited);
    }
    if (net.reverse_search_enabled) {
      context.executed = true;
      context.facts = state->search.value_or(TransportFailure{"deadline exceeded"});
      report.timings_ms[3] = state->search_ms.value_or(waited);
    }
  }
  if (watermark.executed) {
    const auto& w = std::get<WatermarkOutcome>(watermark.facts);
    if (const auto* r = std::get_if<WatermarkResult>(&w)) {
      watermark.findings.push_back(r->detected ? "watermark detected: " + r->watermark_kind : "no watermark detected");
      if (!r->provider.empty()) watermark.findings.push_back("provider: " + r->provider);
    } else if (const auto* f = std::get_if<TransportFailure>(&w)) {
      watermark.findings.push_back("unavailable: " + f->message);
    }
  }
  if (context.executed) {
    const auto& s = std::get<SearchOutcome>(context.facts);
    if (const auto* hits = std::get_if<std::vector<ReverseSearchHit>>(&s)) {
      context.findings.push_back(std::to_string(hits->size()) + " prior cop" + (hits->size() == 1 ? "y" : "ies"));
      for (const auto& h : *hits) {
        context.findings.push_back(h.url + " first seen " +
                                   (h.first_seen ? format_rfc3339(*h.first_seen).substr(0, 10) : "unknown"));
      }
    } else if (const auto* f = std::get_if<TransportFailure>(&s)) {
      context.findings.push_back("unavailable: " + f->message);
    }
  }
  report.layers.push_back(std::move(watermark));
  report.layers.push_back(std::move(context));

  report.verdict = decide(report.layers);
  return report;
}

Report analyze(const ImageBytes& image, const EngineConfig& config, std::shared_ptr<Transport> transport) {
  return Engine::from_config(config, std::move(transport)).analyze(image);
}

}  // namespace originlens
