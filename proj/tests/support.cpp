// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#include "support.hpp"

#include "originlens/cbor.hpp"
#include "originlens/errors.hpp"
#include "originlens/jumbf.hpp"
#include "originlens/manifest.hpp"

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace originlens::testing {

UtcTime test_clock() { return fixture::default_fixture_clock(); }

const fixture::TestCa& test_ca() {
  static const fixture::TestCa ca = fixture::TestCa::make(test_clock(), 3650);
  return ca;
}

const fixture::SigningIdentity& test_signer() {
  static const fixture::SigningIdentity signer = test_ca().issue_leaf();
  return signer;
}

TrustStore test_trust() { return TrustStore({test_ca().root_der()}); }

Engine test_engine(const NetPolicy& policy, std::shared_ptr<Transport> transport) {
  EngineConfig config;
  config.net_policy = policy;
  config.clock_override = test_clock();
  return Engine(test_trust(), default_rule_table(), config, std::move(transport));
}

ImageBytes plain_jpeg(std::uint64_t seed) {
  fixture::PlainImageOptions o;
  o.seed = seed;
  return ImageBytes(fixture::make_plain_jpeg(o));
}

ImageBytes plain_png(std::uint64_t seed) {
  fixture::PlainImageOptions o;
  o.width = 32;
  o.height = 24;
  o.seed = seed;
  return ImageBytes(fixture::make_plain_png(o));
}

ImageBytes signed_capture(const ImageBytes& base, const std::string& generator) {
  return fixture::sign_and_embed(base, test_signer(), {fixture::capture_actions(generator)}, generator,
                                 test_clock());
}

Bytes read_fixture(const std::string& name) {
  return read_file(std::filesystem::path(ORIGINLENS_TEST_FIXTURES) / name);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void write_bytes(const std::filesystem::path& path, ByteView data) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!f) throw std::runtime_error("cannot write " + path.string());
}

HttpResponse CountingTransport::post(const HttpRequest& request) {
  ++calls_;
  {
    std::lock_guard lock(mu_);
    urls_.push_back(request.url);
  }
  if (handler) return handler(request);
  return {200, "{}"};
}

std::vector<std::string> CountingTransport::urls() const {
  std::lock_guard lock(mu_);
  return urls_;
}

TempDir::TempDir() {
  std::random_device rd;
  const auto base = std::filesystem::temp_directory_path();
  for (int attempt = 0; attempt < 16; ++attempt) {
    auto candidate = base / ("originlens-test-" + std::to_string(rd()));
    if (std::filesystem::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("cannot create a temporary directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

CommandResult run_command(const std::string& command) {
  CommandResult result;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (!pipe) return result;
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) result.output.append(buf, n);
  const int status = ::pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string shell_quote(const std::string& arg) {
  std::string out = "'";
  for (char c : arg) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

std::vector<DecisionCell> load_decision_table() {
  std::istringstream in(read_text(std::filesystem::path(ORIGINLENS_TEST_DATA) / "decision_table.tsv"));
  std::vector<DecisionCell> out;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    DecisionCell c;
    std::getline(row, c.manifest, '\t');
    std::getline(row, c.metadata, '\t');
    std::getline(row, c.watermark, '\t');
    std::getline(row, c.context, '\t');
    std::getline(row, c.status, '\t');
    std::getline(row, c.color, '\t');
    std::getline(row, c.confidence, '\t');
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<LayerEvidence> evidence_for(const DecisionCell& cell) {
  ProvenanceFacts p;
  if (cell.manifest != "absent") {
    p.manifest_present = true;
    p.active_label = "urn:uuid:cell";
    p.claim_generator = "Cell Tool";
    ChainResult chain;
    chain.status = ChainStatus::Trusted;
    chain.chain_length = 2;
    p.chain = chain;
    p.signature_valid = true;
    p.binding = BindingCheck{BindingResult::Match, ""};
    p.assertions = {{"c2pa.actions", true}, {"c2pa.hash.data", true}};
    if (cell.manifest == "parse_error") {
      p = ProvenanceFacts{};
      p.manifest_present = true;
      p.parse_error = "claim is not a CBOR map";
    } else if (cell.manifest == "invalid_sig") {
      p.signature_valid = false;
    } else if (cell.manifest == "invalid_binding") {
      p.binding = BindingCheck{BindingResult::Mismatch, ""};
    } else if (cell.manifest == "expired") {
      p.chain->status = ChainStatus::Expired;
    } else if (cell.manifest == "valid_ai") {
      p.generator = "Adobe Firefly";
    } else if (cell.manifest != "valid_plain") {
      throw std::invalid_argument("unknown manifest cell " + cell.manifest);
    }
  }

  MetadataFacts m;
  if (cell.metadata == "ai") {
    m.records = {{MetadataSource::Exif, "Software", "Stable Diffusion XL"}};
    m.matches = {{"stable-diffusion", "Stable Diffusion", MetadataSource::Exif, "Software", "Stable Diffusion XL"}};
  } else if (cell.metadata != "none") {
    throw std::invalid_argument("unknown metadata cell " + cell.metadata);
  }

  LayerEvidence wm{Layer::Watermark, false, {}, {}};
  if (cell.watermark == "detected" || cell.watermark == "none") {
    WatermarkResult r;
    r.detected = cell.watermark == "detected";
    r.provider = "wm.example.test";
    if (r.detected) {
      r.watermark_kind = "SynthID";
      r.provider_confidence = 0.9;
    }
    wm = {Layer::Watermark, true, {r.detected ? "watermark detected" : "no watermark detected"}, WatermarkOutcome{r}};
  } else if (cell.watermark != "skipped") {
    throw std::invalid_argument("unknown watermark cell " + cell.watermark);
  }

  LayerEvidence ctx{Layer::Context, false, {}, {}};
  if (cell.context == "hits" || cell.context == "none") {
    std::vector<ReverseSearchHit> hits;
    if (cell.context == "hits") hits.push_back({"https://news.example/story", parse_rfc3339("2024-01-02T00:00:00Z"), "Story"});
    ctx = {Layer::Context, true, {std::to_string(hits.size()) + " hits"}, SearchOutcome{hits}};
  } else if (cell.context != "skipped") {
    throw std::invalid_argument("unknown context cell " + cell.context);
  }

  return {LayerEvidence{Layer::Provenance, true, {"provenance checked"}, p},
          LayerEvidence{Layer::Metadata, true, {}, m}, wm, ctx};
}

Bytes mutate(ByteView seed, std::mt19937_64& rng) {
  Bytes out(seed.begin(), seed.end());
  const auto mode = rng() % 3;
  if (mode != 1 && !out.empty()) out.resize(rng() % out.size());
  if (mode != 0 && !out.empty()) {
    const int flips = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < flips; ++i) out[rng() % out.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255);
  }
  return out;
}

std::optional<std::string> fuzz_once(const Engine& engine, ByteView input) {
  const ImageBytes image{Bytes(input.begin(), input.end())};
  const auto guarded = [](const char* stage, const auto& fn) -> std::optional<std::string> {
    try {
      fn();
    } catch (const Error&) {
    } catch (const std::exception& e) {
      return std::string(stage) + ": undefined exception: " + e.what();
    } catch (...) {
      return std::string(stage) + ": non-standard exception";
    }
    return std::nullopt;
  };
  std::optional<std::string> failure;
  const auto step = [&](const char* stage, const auto& fn) {
    if (!failure) failure = guarded(stage, fn);
  };
  step("scan_jpeg_segments", [&] { scan_jpeg_segments(image); });
  step("scan_png_chunks", [&] { scan_png_chunks(image); });
  step("salvage_jumbf", [&] { salvage_jumbf(input); });
  step("parse_box_tree", [&] { jumbf::parse_box_tree(input); });
  step("cbor::decode", [&] { cbor::decode(input); });
  step("parse_tiff_metadata", [&] { parse_tiff_metadata(input); });
  step("parse_iptc", [&] { parse_iptc(input); });
  step("carrier", [&] {
    const auto carrier = extract_jumbf(image);
    if (carrier) parse_manifest_store(jumbf::parse_box_tree(carrier->jumbf));
  });
  step("analyze", [&] { engine.analyze(image); });
  return failure;
}

}  // namespace originlens::testing
