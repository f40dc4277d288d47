// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <iterator>

#include "CLI11.hpp"
#include "originlens/crypto_trust.hpp"
#include "originlens/errors.hpp"
#include "originlens/fixture_signer.hpp"
#include "originlens/jumbf.hpp"
#include "originlens/pipeline.hpp"

namespace originlens::cli {

namespace {

struct AnalyzeArgs {
  std::string input;
  bool json = false;
  std::vector<std::string> trust_stores;
  std::string pins;
  std::string crl;
  std::string rules;
  bool enable_watermark = false;
  bool enable_reverse_search = false;
  std::string watermark_endpoint;
  std::string search_endpoint;
  std::string api_token;
  long timeout_ms = 10000;
  std::string now;
};

struct FixtureArgs {
  std::string out;
  std::string seed = fixture::kDefaultSeed;
  std::string now;
  int validity_days = 3650;
};

struct BenchArgs {
  std::string input;
  std::vector<std::string> trust_stores;
  int iterations = 10;
  double budget_l1 = 500.0;
  double budget_exif = 50.0;
  std::string now;
};

int exit_code_for(Status status) {
  switch (status) {
    case Status::Verified: return kExitVerified;
    case Status::AIGenerated: return kExitAiGenerated;
    case Status::Warning: return kExitWarning;
    case Status::Invalid: return kExitInvalid;
    case Status::NoData: return kExitNoData;
  }
  return kExitError;
}

std::optional<UtcTime> clock_flag(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto t = parse_rfc3339(text);
  if (!t) throw Error("--now expects an RFC 3339 timestamp, got '" + text + "'");
  return t;
}

Bytes read_input(const std::string& path, std::istream& in) {
  if (path != "-") return read_file(path);
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw UnreadableInput("cannot read standard input");
  return data;
}

std::string fmt_ms(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : (v[mid - 1] + v[mid]) / 2.0;
}

int cmd_analyze(const AnalyzeArgs& a, const CliContext& ctx) {
  EngineConfig config;
  for (const auto& p : a.trust_stores) config.trust_store_paths.emplace_back(p);
  if (!a.pins.empty()) config.pin_list_path = a.pins;
  if (!a.crl.empty()) config.revocation_list_path = a.crl;
  if (!a.rules.empty()) config.rule_table_path = a.rules;
  config.net_policy.watermark_enabled = a.enable_watermark;
  config.net_policy.reverse_search_enabled = a.enable_reverse_search;
  config.net_policy.watermark_endpoint = a.watermark_endpoint;
  config.net_policy.search_endpoint = a.search_endpoint;
  config.net_policy.bearer_token = a.api_token;
  config.net_policy.timeout = std::chrono::milliseconds(a.timeout_ms);
  config.clock_override = clock_flag(a.now);

  const Engine engine = Engine::from_config(config, ctx.transport);
  for (const auto& w : engine.warnings()) *ctx.err << "warning: " << w << "\n";
  const ImageBytes image(read_input(a.input, *ctx.in));
  const Report report = engine.analyze(image);
  *ctx.out << render_report(report, a.json ? RenderMode::Json : RenderMode::Human, ctx.ansi && !a.json);
  return exit_code_for(report.verdict.status);
}

int cmd_fixture(const FixtureArgs& a, const CliContext& ctx) {
  fixture::CorpusOptions options;
  options.seed = a.seed;
  if (auto t = clock_flag(a.now)) options.now = *t;
  options.validity_days = a.validity_days;
  for (const auto& e : fixture::write_corpus(a.out, options)) {
    *ctx.out << e.file_name << "\t" << e.expected_status << "\n";
  }
  return kExitVerified;
}

int cmd_bench(const BenchArgs& a, const CliContext& ctx) {
  if (a.iterations < 1) throw Error("--iterations must be at least 1");
  const UtcTime clock = clock_flag(a.now).value_or(fixture::default_fixture_clock());
  ImageBytes image;
  TrustStore trust;
  if (a.input.empty()) {
    const auto ca = fixture::TestCa::make(clock, 3650);
    image = fixture::make_bench_image(ca.issue_leaf(), clock);
    trust = TrustStore({ca.root_der()});
  } else {
    image = ImageBytes(read_file(a.input));
    std::vector<std::filesystem::path> paths(a.trust_stores.begin(), a.trust_stores.end());
    trust = TrustStore::load(paths, nullptr, nullptr);
  }
  EngineConfig config;
  config.clock_override = clock;
  const Engine engine(std::move(trust), default_rule_table(), config);

  *ctx.out << "input: " << image.size() << " bytes, sha256 " << to_hex(sha256(image.bytes())) << "\n";
  *ctx.out << "iteration\tstatus\tlayer1_ms\texif_ms\tmetadata_ms\n";
  std::vector<double> l1, exif;
  for (int i = 0; i < a.iterations; ++i) {
    const Report r = engine.analyze(image);
    const auto* facts = std::get_if<MetadataFacts>(&r.layers[1].facts);
    l1.push_back(r.timings_ms[0].value_or(0.0));
    exif.push_back(facts && facts->exif_parse_ms ? *facts->exif_parse_ms : 0.0);
    *ctx.out << i + 1 << "\t" << to_string(r.verdict.status) << "\t" << fmt_ms(l1.back()) << "\t"
             << fmt_ms(exif.back()) << "\t" << fmt_ms(r.timings_ms[1].value_or(0.0)) << "\n";
  }
  const double l1_median = median(l1);
  const double exif_median = median(exif);
  *ctx.out << "median layer1_ms " << fmt_ms(l1_median) << " (budget " << fmt_ms(a.budget_l1) << ")\n";
  *ctx.out << "median exif_ms " << fmt_ms(exif_median) << " (budget " << fmt_ms(a.budget_exif) << ")\n";
  // Budgets are advisory on shared hardware.
  if (l1_median >= a.budget_l1) *ctx.out << "WARN layer-1 median exceeds its budget\n";
  if (exif_median >= a.budget_exif) *ctx.out << "WARN EXIF parse median exceeds its budget\n";
  return kExitVerified;
}

int cmd_trust_inspect(const std::string& file, const CliContext& ctx) {
  const Bytes data = read_file(file);
  std::vector<Bytes> certs;
  const ImageBytes image(data);
  if (image.format() != ImageFormat::Unknown) {
    auto carrier = extract_jumbf(image);
    if (!carrier) throw Error(file + " carries no provenance manifest");
    certs = parse_manifest_store(jumbf::parse_box_tree(carrier->jumbf)).active().signature.cert_chain;
  } else {
    const std::string text = to_string(data);
    if (text.find("-----BEGIN") != std::string::npos) {
      certs = TrustStore::parse_pem_bundle(text);
    } else {
      certs.push_back(data);
    }
  }
  if (certs.empty()) throw Error(file + " holds no certificates");
  for (std::size_t i = 0; i < certs.size(); ++i) {
    const CertificateInfo info = describe_certificate(certs[i]);
    *ctx.out << "certificate " << i << "\n"
             << "  subject: " << info.subject << "\n"
             << "  issuer: " << info.issuer << "\n"
             << "  not_before: " << info.not_before << "\n"
             << "  not_after: " << info.not_after << "\n"
             << "  pin: " << to_hex(info.spki_digest) << "\n"
             << "  revocation: " << to_hex(info.issuer_name_hash) << ":" << info.serial_hex << "\n";
  }
  return kExitVerified;
}

}  // namespace

int run_cli(int argc, const char* const* argv, const CliContext& ctx) {
  CLI::App app{"Image provenance verification", "originlens"};
  app.require_subcommand(1);

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Verify an image and print a provenance report");
  analyze->add_option("input", an.input, "Image path, or - for standard input")->required();
  analyze->add_flag("--json", an.json, "Emit the JSON report")->envname("ORIGINLENS_JSON");
  analyze->add_option("--trust-store", an.trust_stores, "PEM bundle of trusted roots (repeatable)")
      ->allow_extra_args(false)
      ->envname("ORIGINLENS_TRUST_STORE");
  analyze->add_option("--pins", an.pins, "Leaf SPKI SHA-256 pin list")->envname("ORIGINLENS_PINS");
  analyze->add_option("--crl", an.crl, "Revoked issuer:serial list")->envname("ORIGINLENS_CRL");
  analyze->add_option("--rules", an.rules, "AI signature rule table (JSON)")->envname("ORIGINLENS_RULES");
  analyze->add_flag("--enable-watermark", an.enable_watermark, "Send the image to the watermark API")
      ->envname("ORIGINLENS_ENABLE_WATERMARK");
  analyze->add_flag("--enable-reverse-search", an.enable_reverse_search, "Send the image to the reverse search API")
      ->envname("ORIGINLENS_ENABLE_REVERSE_SEARCH");
  analyze->add_option("--watermark-endpoint", an.watermark_endpoint, "Watermark API base URL")
      ->envname("ORIGINLENS_WATERMARK_ENDPOINT");
  analyze->add_option("--search-endpoint", an.search_endpoint, "Reverse search API base URL")
      ->envname("ORIGINLENS_SEARCH_ENDPOINT");
  analyze->add_option("--api-token", an.api_token, "Bearer token for the network APIs")
      ->envname("ORIGINLENS_API_TOKEN");
  analyze->add_option("--timeout-ms", an.timeout_ms, "Per-request network timeout")
      ->envname("ORIGINLENS_TIMEOUT_MS")
      ->check(CLI::Range(1L, 600000L));
  analyze->add_option("--now", an.now, "Verification clock (RFC 3339)")->envname("ORIGINLENS_NOW");

  FixtureArgs fx;
  auto* fixture_cmd = app.add_subcommand("fixture", "Write a signed fixture corpus");
  fixture_cmd->add_option("--out", fx.out, "Output directory")->required();
  fixture_cmd->add_option("--seed", fx.seed, "Key derivation seed");
  fixture_cmd->add_option("--now", fx.now, "Signing clock (RFC 3339)");
  fixture_cmd->add_option("--validity-days", fx.validity_days, "Certificate validity")->check(CLI::Range(1, 36500));

  BenchArgs bn;
  auto* bench = app.add_subcommand("bench", "Time layer-1 validation and EXIF parsing");
  bench->add_option("--input", bn.input, "Signed image; default generates a 12 MP fixture");
  bench->add_option("--trust-store", bn.trust_stores, "Roots for --input")
      ->allow_extra_args(false)
      ->envname("ORIGINLENS_TRUST_STORE");
  bench->add_option("--iterations", bn.iterations, "Analyze runs");
  bench->add_option("--budget-l1", bn.budget_l1, "Layer-1 budget in ms");
  bench->add_option("--budget-exif", bn.budget_exif, "EXIF parse budget in ms");
  bench->add_option("--now", bn.now, "Verification clock (RFC 3339)");

  std::string inspect_file;
  auto* trust = app.add_subcommand("trust", "Trust material helpers");
  trust->require_subcommand(1);
  auto* inspect = trust->add_subcommand("inspect", "Print pin and revocation entries for a certificate or image");
  inspect->add_option("file", inspect_file, "PEM/DER certificate or signed image")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, *ctx.out, *ctx.err) == 0 ? kExitVerified : kExitError;
  }

  try {
    if (*analyze) return cmd_analyze(an, ctx);
    if (*fixture_cmd) return cmd_fixture(fx, ctx);
    if (*bench) return cmd_bench(bn, ctx);
    if (*inspect) return cmd_trust_inspect(inspect_file, ctx);
  } catch (const std::exception& e) {
    *ctx.err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace originlens::cli
