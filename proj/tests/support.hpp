// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

// Shared test fixtures: one deterministic CA per process, signed carriers,
// a counting transport and small process helpers.

#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "originlens/fixture_signer.hpp"
#include "originlens/pipeline.hpp"

namespace originlens::testing {

UtcTime test_clock();
const fixture::TestCa& test_ca();
const fixture::SigningIdentity& test_signer();
TrustStore test_trust();

/// Engine trusting test_ca() with the clock pinned to test_clock().
Engine test_engine(const NetPolicy& policy = {}, std::shared_ptr<Transport> transport = nullptr);

ImageBytes plain_jpeg(std::uint64_t seed = 1);
ImageBytes plain_png(std::uint64_t seed = 2);

/// Camera-style manifest signed by test_signer().
ImageBytes signed_capture(const ImageBytes& base, const std::string& generator = "Origin Lens Camera 1.0");

Bytes read_fixture(const std::string& name);
std::string read_text(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, ByteView data);

/// Records every call; replies through `handler` (default: 200 "{}").
class CountingTransport : public Transport {
 public:
  HttpResponse post(const HttpRequest& request) override;
  int calls() const { return calls_.load(); }
  std::vector<std::string> urls() const;

  std::function<HttpResponse(const HttpRequest&)> handler;

 private:
  std::atomic<int> calls_{0};
  mutable std::mutex mu_;
  std::vector<std::string> urls_;
};

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct CommandResult {
  int exit_code = -1;
  std::string output;  // standard output only
};

/// Runs a shell command and captures standard output.
CommandResult run_command(const std::string& command);

/// Shell-quotes one argument.
std::string shell_quote(const std::string& arg);

// One row of tests/data/decision_table.tsv.
struct DecisionCell {
  std::string manifest;
  std::string metadata;
  std::string watermark;
  std::string context;
  std::string status;
  std::string color;
  std::string confidence;
};

std::vector<DecisionCell> load_decision_table();

// Evidence for a cell's four input columns. Throws std::invalid_argument on
// an unknown column value.
std::vector<LayerEvidence> evidence_for(const DecisionCell& cell);

// One mutation of a seed input: a truncation, 1 to 8 byte flips, or both.
Bytes mutate(ByteView seed, std::mt19937_64& rng);

// Runs every parser and Engine::analyze on the input. Returns a description
// when anything other than an originlens::Error escapes; defined errors and
// reports are both acceptable outcomes.
std::optional<std::string> fuzz_once(const Engine& engine, ByteView input);

}  // namespace originlens::testing
