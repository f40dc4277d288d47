// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#include "originlens/netlayers.hpp"

#include <algorithm>

#include "json.hpp"
#include "originlens/errors.hpp"

namespace originlens {

namespace {

constexpr char kOctetStream[] = "application/octet-stream";

std::string join_url(const std::string& endpoint, std::string_view path) {
  if (endpoint.empty()) throw TransportError("no endpoint configured");
  std::string url = endpoint;
  while (!url.empty() && url.back() == '/') url.pop_back();
  return url + std::string(path);
}

nlohmann::json parse_reply(const HttpResponse& response) {
  if (response.status < 200 || response.status > 299) {
    throw TransportError("provider replied with HTTP " + std::to_string(response.status));
  }
  try {
    return nlohmann::json::parse(response.body);
  } catch (const nlohmann::json::exception&) {
    throw TransportError("provider reply is not JSON");
  }
}

std::string host_of(const std::string& url) {
  auto start = url.find("://");
  start = start == std::string::npos ? 0 : start + 3;
  auto end = url.find('/', start);
  return url.substr(start, end == std::string::npos ? std::string::npos : end - start);
}

}  // namespace

WatermarkResult decode_watermark_reply(const HttpResponse& response, const std::string& provider) {
  const auto doc = parse_reply(response);
  if (!doc.is_object()) throw TransportError("watermark reply is not an object");
  const auto detected = doc.find("detected");
  if (detected == doc.end() || !detected->is_boolean()) throw TransportError("watermark reply lacks 'detected'");
  WatermarkResult result;
  result.provider = provider;
  result.detected = detected->get<bool>();
  if (!result.detected) return result;
  if (auto kind = doc.find("kind"); kind != doc.end() && kind->is_string()) result.watermark_kind = kind->get<std::string>();
  if (auto conf = doc.find("confidence"); conf != doc.end() && !conf->is_null()) {
    if (!conf->is_number()) throw TransportError("watermark confidence is not a number");
    const double c = conf->get<double>();
    if (!(c >= 0.0 && c <= 1.0)) throw TransportError("watermark confidence outside [0, 1]");
    result.provider_confidence = c;
  }
  return result;
}

std::vector<ReverseSearchHit> decode_search_reply(const HttpResponse& response) {
  const auto doc = parse_reply(response);
  if (!doc.is_object()) throw TransportError("search reply is not an object");
  const auto hits = doc.find("hits");
  if (hits == doc.end() || !hits->is_array()) throw TransportError("search reply lacks a 'hits' array");
  std::vector<ReverseSearchHit> out;
  for (const auto& h : *hits) {
    if (!h.is_object()) throw TransportError("search hit is not an object");
    auto url = h.find("url");
    if (url == h.end() || !url->is_string() || url->get<std::string>().empty()) {
      throw TransportError("search hit lacks a url");
    }
    ReverseSearchHit hit;
    hit.url = url->get<std::string>();
    // Unparseable dates count as unknown.
    if (auto seen = h.find("first_seen"); seen != h.end() && seen->is_string()) {
      hit.first_seen = parse_date_or_timestamp(seen->get<std::string>());
    }
    if (auto title = h.find("title"); title != h.end() && title->is_string()) hit.title = title->get<std::string>();
    out.push_back(std::move(hit));
  }
  std::stable_sort(out.begin(), out.end(), [](const ReverseSearchHit& a, const ReverseSearchHit& b) {
    if (a.first_seen && b.first_seen) return *a.first_seen < *b.first_seen;
    return a.first_seen.has_value() && !b.first_seen.has_value();
  });
  return out;
}

WatermarkOutcome check_watermark(const ImageBytes& image, const NetPolicy& policy, Transport& transport) {
  if (!policy.watermark_enabled) return Skipped{};
  try {
    HttpRequest req{join_url(policy.watermark_endpoint, "/v1/detect"), kOctetStream, image.bytes(), policy.timeout,
                    policy.bearer_token};
    return decode_watermark_reply(transport.post(req), host_of(policy.watermark_endpoint));
  } catch (const TransportError& e) {
    return TransportFailure{e.what()};
  }
}

SearchOutcome reverse_search(const ImageBytes& image, const NetPolicy& policy, Transport& transport) {
  if (!policy.reverse_search_enabled) return Skipped{};
  try {
    HttpRequest req{join_url(policy.search_endpoint, "/v1/search"), kOctetStream, image.bytes(), policy.timeout,
                    policy.bearer_token};
    return decode_search_reply(transport.post(req));
  } catch (const TransportError& e) {
    return TransportFailure{e.what()};
  }
}

}  // namespace originlens
