// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite. One PASS/FAIL line per criterion; exits nonzero when a
// gated criterion fails. Latency is reported against its budget and never
// gates, since desk hardware differs between machines.

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "originlens/jumbf.hpp"
#include "originlens/manifest.hpp"
#include "support.hpp"

namespace originlens {
namespace {

using Clock = std::chrono::steady_clock;

// Pinned tolerances.
constexpr double kRoundTripBudgetS = 30.0;
constexpr int kTamperCases = 200;
constexpr double kTamperBudgetS = 60.0;
constexpr std::size_t kDecisionCells = 126;
constexpr int kHashCases = 50;
constexpr double kLayer1BudgetMs = 500.0;
constexpr double kExifBudgetMs = 50.0;
constexpr int kLatencyIterations = 5;
constexpr int kFuzzCases = 10000;
constexpr int kHistorySteps = 3;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int precision = 2) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

Engine corpus_engine(const std::filesystem::path& dir, std::shared_ptr<Transport> transport = nullptr) {
  EngineConfig config;
  config.trust_store_paths = {dir / "roots.pem"};
  config.clock_override = fixture::default_fixture_clock();
  return Engine::from_config(config, std::move(transport));
}

// Hex digests from the Python oracle, one per `<path> [offset:length ...]` line.
std::vector<std::string> python_digests(const std::string& lines, const std::filesystem::path& work) {
  const auto input = work / "oracle_input.txt";
  std::ofstream(input) << lines;
  const auto result = testing::run_command("python3 " + testing::shell_quote(ORIGINLENS_TEST_DATA "/hash_oracle.py") +
                                           " < " + testing::shell_quote(input.string()));
  if (result.exit_code != 0) throw std::runtime_error("hash oracle exited with " + std::to_string(result.exit_code));
  std::vector<std::string> out;
  std::istringstream s(result.output);
  for (std::string line; std::getline(s, line);) out.push_back(line);
  return out;
}

Outcome round_trip(const std::filesystem::path& dir, const std::vector<fixture::CorpusEntry>& entries) {
  const auto start = Clock::now();
  const Engine engine = corpus_engine(dir);
  const std::set<std::string> variants = {"clean", "ai_claim", "tampered", "stripped", "expired", "untrusted"};
  std::set<std::string> covered;
  int mismatches = 0;
  std::string first;
  for (const auto& e : entries) {
    const Report r = engine.analyze(ImageBytes(read_file(dir / e.file_name)));
    bool ok = to_string(r.verdict.status) == e.expected_status;
    const auto stem = std::filesystem::path(e.file_name).stem().string();
    if (stem == "ai_claim") ok = ok && r.verdict.confidence == Confidence::High;
    if (variants.count(stem)) covered.insert(e.file_name);
    if (!ok) {
      ++mismatches;
      if (first.empty()) first = e.file_name + " got " + to_string(r.verdict.status);
    }
  }
  const double elapsed = seconds_since(start);
  const bool pass = mismatches == 0 && covered.size() >= 2 * variants.size() && elapsed < kRoundTripBudgetS;
  return {pass, std::to_string(entries.size()) + " files, " + std::to_string(covered.size()) +
                    " format variants, " + std::to_string(mismatches) + " mismatches" +
                    (first.empty() ? "" : " (first: " + first + ")") + ", " + fmt(elapsed) + " s (limit " +
                    fmt(kRoundTripBudgetS, 0) + " s)"};
}

Outcome tamper_sensitivity() {
  const auto start = Clock::now();
  const Engine engine = testing::test_engine();
  const std::vector<ImageBytes> signed_images = {testing::signed_capture(testing::plain_jpeg()),
                                                 testing::signed_capture(testing::plain_png())};
  std::mt19937_64 rng(4242);
  std::map<std::string, int> statuses;
  for (int i = 0; i < kTamperCases; ++i) {
    const ImageBytes& original = signed_images[i % signed_images.size()];
    const auto carrier = extract_jumbf(original);
    const Manifest m = parse_manifest_store(jumbf::parse_box_tree(carrier->jumbf)).active();
    const auto exclusions = normalize_exclusions(m.hard_binding->exclusions, original.size());
    std::uint64_t pos = 0;
    do {
      pos = rng() % original.size();
    } while (std::any_of(exclusions.begin(), exclusions.end(),
                         [&](const ByteRange& r) { return pos >= r.offset && pos < r.end(); }));
    Bytes bytes(original.bytes().begin(), original.bytes().end());
    bytes[pos] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    ++statuses[to_string(engine.analyze(ImageBytes(std::move(bytes))).verdict.status)];
  }
  const double elapsed = seconds_since(start);
  std::string tally;
  for (const auto& [status, n] : statuses) tally += (tally.empty() ? "" : ", ") + status + "=" + std::to_string(n);
  const bool pass = statuses["invalid"] == kTamperCases && statuses["verified"] == 0 && elapsed < kTamperBudgetS;
  return {pass, std::to_string(kTamperCases) + " flips: " + tally + ", " + fmt(elapsed) + " s (limit " +
                    fmt(kTamperBudgetS, 0) + " s)"};
}

Outcome decision_table() {
  const auto table = testing::load_decision_table();
  std::set<std::string> manifest, metadata, watermark, context, cells;
  int mismatches = 0;
  std::string first;
  for (const auto& row : table) {
    manifest.insert(row.manifest);
    metadata.insert(row.metadata);
    watermark.insert(row.watermark);
    context.insert(row.context);
    cells.insert(row.manifest + "/" + row.metadata + "/" + row.watermark + "/" + row.context);
    const auto evidence = testing::evidence_for(row);
    const Verdict v = decide(evidence);
    if (to_string(v.status) != row.status || to_string(v.color) != row.color ||
        to_string(v.confidence) != row.confidence || v.reasons.empty()) {
      ++mismatches;
      if (first.empty()) first = row.manifest + "/" + row.metadata + "/" + row.watermark + "/" + row.context;
    }
  }
  const std::size_t product = manifest.size() * metadata.size() * watermark.size() * context.size();
  const bool pass = table.size() == kDecisionCells && cells.size() == kDecisionCells && product == kDecisionCells &&
                    mismatches == 0;
  return {pass, std::to_string(cells.size()) + " distinct cells of " + std::to_string(product) + ", " +
                    std::to_string(mismatches) + " mismatches" + (first.empty() ? "" : " (first: " + first + ")")};
}

Outcome hash_oracle(const std::filesystem::path& work) {
  std::mt19937_64 rng(50);
  std::ostringstream lines;
  std::vector<std::string> ours;
  const auto add_case = [&](const Bytes& content, const std::vector<ByteRange>& exclusions) {
    const auto path = work / ("hash_case_" + std::to_string(ours.size()) + ".bin");
    testing::write_bytes(path, content);
    lines << path.string();
    for (const auto& r : exclusions) lines << " " << r.offset << ":" << r.length;
    lines << "\n";
    ours.push_back(to_hex(compute_content_hash(ImageBytes(Bytes(content)), exclusions)));
  };
  add_case({}, {});
  add_case({'a', 'b', 'c'}, {});
  for (int i = 2; i < kHashCases; ++i) {
    Bytes content(rng() % 4096);
    for (auto& b : content) b = static_cast<std::uint8_t>(rng());
    std::vector<ByteRange> exclusions;
    const int n = content.empty() ? 0 : static_cast<int>(rng() % 5);
    for (int k = 0; k < n; ++k) {
      const std::uint64_t offset = rng() % content.size();
      exclusions.push_back({offset, rng() % (content.size() - offset + 1)});
    }
    add_case(content, exclusions);
  }
  const auto theirs = python_digests(lines.str(), work);
  int mismatches = 0;
  for (std::size_t i = 0; i < ours.size(); ++i) {
    if (i >= theirs.size() || theirs[i] != ours[i]) ++mismatches;
  }
  const bool vectors = ours[0] == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855" &&
                       ours[1] == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad";
  return {mismatches == 0 && vectors && theirs.size() == ours.size(),
          std::to_string(ours.size()) + " cases against python hashlib, " + std::to_string(mismatches) +
              " mismatches, empty/abc vectors " + (vectors ? "match" : "differ")};
}

Outcome privacy(const std::filesystem::path& dir, const std::vector<fixture::CorpusEntry>& entries) {
  auto transport = std::make_shared<testing::CountingTransport>();
  const Engine engine = corpus_engine(dir, transport);
  for (const auto& e : entries) engine.analyze(ImageBytes(read_file(dir / e.file_name)));
  return {transport->calls() == 0,
          std::to_string(transport->calls()) + " transport calls over " + std::to_string(entries.size()) + " files"};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v.size() % 2 ? v[v.size() / 2] : (v[v.size() / 2 - 1] + v[v.size() / 2]) / 2.0;
}

Outcome latency() {
  const UtcTime clock = fixture::default_fixture_clock();
  const auto ca = fixture::TestCa::make(clock, 3650);
  const ImageBytes image = fixture::make_bench_image(ca.issue_leaf(), clock);
  EngineConfig config;
  config.clock_override = clock;
  const Engine engine(TrustStore({ca.root_der()}), default_rule_table(), config);
  std::vector<double> l1, exif;
  Status status = Status::NoData;
  for (int i = 0; i < kLatencyIterations; ++i) {
    const Report r = engine.analyze(image);
    status = r.verdict.status;
    l1.push_back(r.timings_ms[0].value_or(0.0));
    const auto* facts = std::get_if<MetadataFacts>(&r.layers[1].facts);
    exif.push_back(facts && facts->exif_parse_ms ? *facts->exif_parse_ms : 0.0);
  }
  const double l1_median = median(l1);
  const double exif_median = median(exif);
  const bool within = l1_median < kLayer1BudgetMs && exif_median < kExifBudgetMs;
  // Report only: the outcome does not depend on the measured times.
  return {true, std::to_string(image.size()) + " byte 12 MP JPEG (" + to_string(status) + "), layer-1 median " +
                    fmt(l1_median) + " ms (budget " + fmt(kLayer1BudgetMs, 0) + "), EXIF median " + fmt(exif_median, 3) +
                    " ms (budget " + fmt(kExifBudgetMs, 0) + ")" + (within ? "" : ", WARN over budget") +
                    ", report only"};
}

Outcome fuzz_totality(const std::filesystem::path& dir, const std::vector<fixture::CorpusEntry>& entries) {
  const Engine engine = corpus_engine(dir);
  std::vector<Bytes> seeds;
  for (const auto& e : entries) seeds.push_back(read_file(dir / e.file_name));
  std::mt19937_64 rng(10000);
  int failures = 0;
  std::string first;
  for (int i = 0; i < kFuzzCases; ++i) {
    const Bytes input = testing::mutate(seeds[i % seeds.size()], rng);
    if (const auto failure = testing::fuzz_once(engine, input)) {
      ++failures;
      if (first.empty()) first = *failure;
    }
  }
  return {failures == 0, std::to_string(kFuzzCases) + " mutated inputs, " + std::to_string(failures) +
                             " undefined outcomes" + (first.empty() ? "" : " (first: " + first + ")")};
}

// Brute force: every ordering of the store's manifests that starts at a
// manifest without ingredients, ends at the active one, and links each step
// by an ingredient digest equal to the oracle digest of the previous box.
Outcome edit_history(const std::filesystem::path& work) {
  const ImageBytes image =
      fixture::make_ingredient_chain(testing::plain_jpeg(), kHistorySteps, testing::test_signer(), testing::test_clock());
  const Report report = testing::test_engine().analyze(image);

  const jumbf::Box root = jumbf::parse_box_tree(extract_jumbf(image)->jumbf);
  const ManifestStore store = parse_manifest_store(root);
  std::ostringstream lines;
  std::vector<std::string> labels;
  for (const auto& child : root.children) {
    if (!child.label || !store.find(*child.label)) continue;
    const auto path = work / ("manifest_" + std::to_string(labels.size()) + ".bin");
    testing::write_bytes(path, jumbf::serialize_box_tree(child));
    lines << path.string() << "\n";
    labels.push_back(*child.label);
  }
  const auto digests = python_digests(lines.str(), work);
  std::map<std::string, std::string> oracle_digest;
  for (std::size_t i = 0; i < labels.size() && i < digests.size(); ++i) oracle_digest[labels[i]] = digests[i];

  std::vector<std::string> best;
  std::vector<std::string> order = labels;
  std::sort(order.begin(), order.end());
  do {
    for (std::size_t len = 1; len <= order.size(); ++len) {
      if (order[len - 1] != store.active_label) continue;
      bool linked = store.find(order[0])->claim.ingredient_refs.empty();
      for (std::size_t i = 1; linked && i < len; ++i) {
        const auto& refs = store.find(order[i])->claim.ingredient_refs;
        linked = !refs.empty() && to_hex(refs.front().digest) == oracle_digest[order[i - 1]];
      }
      if (linked && len > best.size()) best.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(len));
    }
  } while (std::next_permutation(order.begin(), order.end()));

  bool match = report.edit_history.size() == best.size();
  for (std::size_t i = 0; match && i < best.size(); ++i) {
    const auto& entry = report.edit_history[i];
    match = entry.manifest_label == best[i];
    if (i == 0) {
      match = match && !entry.ingredient_digest;
    } else {
      match = match && entry.ingredient_digest && to_hex(*entry.ingredient_digest) == oracle_digest[best[i - 1]];
    }
  }
  const bool pass = match && best.size() == static_cast<std::size_t>(kHistorySteps);
  return {pass, std::to_string(report.edit_history.size()) + " history entries, oracle chain of " +
                    std::to_string(best.size()) + ", order and ingredient digests " + (match ? "match" : "differ")};
}

}  // namespace
}  // namespace originlens

int main() {
  using namespace originlens;
  testing::TempDir dir;
  testing::TempDir work;
  const auto entries = fixture::write_corpus(dir.path());

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 round-trip integrity", [&] { return round_trip(dir.path(), entries); }},
      {"2 tamper sensitivity", [] { return tamper_sensitivity(); }},
      {"3 decision-table exhaustiveness", [] { return decision_table(); }},
      {"4 hash oracle", [&] { return hash_oracle(work.path()); }},
      {"5 privacy invariant", [&] { return privacy(dir.path(), entries); }},
      {"6 latency budgets", [] { return latency(); }},
      {"7 fuzz totality", [&] { return fuzz_totality(dir.path(), entries); }},
      {"8 edit history", [&] { return edit_history(work.path()); }},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
