// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "originlens/errors.hpp"
#include "originlens/netlayers.hpp"

namespace originlens {

HttpResponse HttpTransport::post(const HttpRequest& request) {
  const auto scheme_end = request.url.find("://");
  if (scheme_end == std::string::npos) throw TransportError("endpoint URL lacks a scheme: " + request.url);
  const auto path_start = request.url.find('/', scheme_end + 3);
  const std::string origin = request.url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : request.url.substr(path_start);

  httplib::Client client(origin);
  if (!client.is_valid()) throw TransportError("unsupported endpoint URL: " + request.url);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(request.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(request.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers headers;
  if (!request.bearer_token.empty()) headers.emplace("Authorization", "Bearer " + request.bearer_token);
  auto res = client.Post(path, headers, reinterpret_cast<const char*>(request.body.data()), request.body.size(),
                         request.content_type);
  if (!res) throw TransportError("request to " + origin + " failed: " + httplib::to_string(res.error()));
  return {res->status, res->body};
}

}  // namespace originlens
