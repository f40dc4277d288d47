// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

// Opt-in network layers: watermark detection and reverse image search.
// Nothing here touches the network unless the matching NetPolicy flag is set.

#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "originlens/container.hpp"
#include "originlens/timeutil.hpp"

namespace originlens {

struct HttpRequest {
  std::string url;
  std::string content_type;
  ByteView body;
  std::chrono::milliseconds timeout{10000};
  std::string bearer_token;  // sent as Authorization: Bearer when non-empty
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// POST-only transport. Implementations throw TransportError on connection
/// failure or timeout; non-2xx replies are returned, not thrown.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const HttpRequest& request) = 0;
};

/// cpp-httplib client; http and https URLs.
class HttpTransport final : public Transport {
 public:
  HttpResponse post(const HttpRequest& request) override;
};

struct NetPolicy {
  bool watermark_enabled = false;
  bool reverse_search_enabled = false;
  std::chrono::milliseconds timeout{10000};
  std::string watermark_endpoint;
  std::string search_endpoint;
  std::string bearer_token;
};

struct WatermarkResult {
  bool detected = false;
  std::string watermark_kind;
  std::optional<double> provider_confidence;  // only when detected
  std::string provider;
};

struct ReverseSearchHit {
  std::string url;
  std::optional<UtcTime> first_seen;
  std::optional<std::string> title;
};

struct Skipped {};

struct TransportFailure {
  std::string message;
};

template <typename T>
using NetResult = std::variant<Skipped, TransportFailure, T>;

using WatermarkOutcome = NetResult<WatermarkResult>;
using SearchOutcome = NetResult<std::vector<ReverseSearchHit>>;

/// Throws TransportError for a missing endpoint, a transport failure, a
/// non-2xx status or a reply that does not match the contract.
WatermarkResult decode_watermark_reply(const HttpResponse& response, const std::string& provider);
std::vector<ReverseSearchHit> decode_search_reply(const HttpResponse& response);

/// Skipped when disabled. Transport errors become TransportFailure.
WatermarkOutcome check_watermark(const ImageBytes& image, const NetPolicy& policy, Transport& transport);

/// Hits sorted by first_seen ascending, undated hits last.
SearchOutcome reverse_search(const ImageBytes& image, const NetPolicy& policy, Transport& transport);

}  // namespace originlens
