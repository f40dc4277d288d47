// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "originlens/container.hpp"
#include "originlens/crypto_trust.hpp"
#include "originlens/metadata.hpp"
#include "originlens/netlayers.hpp"
#include "originlens/verdict.hpp"

namespace originlens {

struct EngineConfig {
  std::vector<std::filesystem::path> trust_store_paths;
  std::optional<std::filesystem::path> pin_list_path;
  std::optional<std::filesystem::path> revocation_list_path;
  std::optional<std::filesystem::path> rule_table_path;
  NetPolicy net_policy;
  std::optional<UtcTime> clock_override;
  /// Upper bound for a whole analyze call including the network layers.
  std::chrono::milliseconds pipeline_deadline{30000};
};

/// Loaded trust material and rules. Immutable; analyze may run concurrently.
class Engine {
 public:
  /// Loads every configured file. Throws TrustMaterialError or RuleTableError.
  /// A null transport means HttpTransport when a network layer is enabled.
  static Engine from_config(const EngineConfig& config, std::shared_ptr<Transport> transport = nullptr);

  Engine(TrustStore trust, std::vector<AiSignatureRule> rules, EngineConfig config,
         std::shared_ptr<Transport> transport = nullptr);

  /// Throws UnreadableInput for empty input; every other failure becomes
  /// evidence.
  Report analyze(const ImageBytes& image) const;

  /// Startup notes such as an empty trust store.
  const std::vector<std::string>& warnings() const { return warnings_; }
  const TrustStore& trust_store() const { return trust_; }

 private:
  TrustStore trust_;
  std::vector<AiSignatureRule> rules_;
  EngineConfig config_;
  std::shared_ptr<Transport> transport_;
  std::vector<std::string> warnings_;
};

Report analyze(const ImageBytes& image, const EngineConfig& config, std::shared_ptr<Transport> transport = nullptr);

/// Reads a whole file. Throws UnreadableInput.
Bytes read_file(const std::filesystem::path& path);

}  // namespace originlens
