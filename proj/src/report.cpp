// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "originlens/verdict.hpp"

namespace originlens {

namespace {

const char* ansi_for(Color c) {
  switch (c) {
    case Color::Green: return "\033[32m";
    case Color::Purple: return "\033[35m";
    case Color::Orange: return "\033[33m";
    case Color::Red: return "\033[31m";
    case Color::Gray: return "\033[90m";
  }
  return "";
}

const char* display_status(Status s) {
  switch (s) {
    case Status::Verified: return "Verified";
    case Status::AIGenerated: return "AI Generated";
    case Status::Warning: return "Warning";
    case Status::Invalid: return "Invalid";
    case Status::NoData: return "No Data";
  }
  return "Unknown";
}

std::string ms(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string timestamp_text(const EditHistoryEntry& e) {
  return e.timestamp ? format_rfc3339(*e.timestamp) : "unknown";
}

std::string render_json(const Report& r) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["schema"] = kReportSchema;
  doc["status"] = to_string(r.verdict.status);
  doc["color"] = to_string(r.verdict.color);
  doc["confidence"] = to_string(r.verdict.confidence);
  doc["reasons"] = r.verdict.reasons;
  ordered_json layers = ordered_json::array();
  for (const auto& e : r.layers) {
    ordered_json l;
    l["layer"] = to_string(e.layer);
    l["executed"] = e.executed;
    l["findings"] = e.findings;
    const auto& t = r.timings_ms[static_cast<std::size_t>(e.layer)];
    if (e.executed && t) {
      l["timing_ms"] = *t;
    } else {
      l["timing_ms"] = nullptr;
    }
    layers.push_back(std::move(l));
  }
  doc["layers"] = std::move(layers);
  ordered_json history = ordered_json::array();
  for (const auto& h : r.edit_history) {
    ordered_json e;
    e["manifest_label"] = h.manifest_label;
    e["claim_generator"] = h.claim_generator;
    e["timestamp"] = h.timestamp ? ordered_json(format_rfc3339(*h.timestamp)) : ordered_json(nullptr);
    e["action"] = h.action ? ordered_json(*h.action) : ordered_json(nullptr);
    e["ingredient_digest"] = h.ingredient_digest ? ordered_json(to_hex(*h.ingredient_digest)) : ordered_json(nullptr);
    history.push_back(std::move(e));
  }
  doc["edit_history"] = std::move(history);
  doc["input_sha256"] = to_hex(r.input_digest);
  return doc.dump(2, ' ', false, ordered_json::error_handler_t::replace) + "\n";
}

std::string render_human(const Report& r, bool ansi) {
  std::ostringstream out;
  const auto& v = r.verdict;
  out << "status: ";
  if (ansi) out << ansi_for(v.color) << "\033[1m";
  out << display_status(v.status) << " (" << to_string(v.color) << ")";
  if (ansi) out << "\033[0m";
  out << "\nconfidence: " << to_string(v.confidence) << "\n";
  out << "input sha256: " << to_hex(r.input_digest) << "\n";
  if (!v.reasons.empty()) {
    out << "\nreasons:\n";
    for (const auto& reason : v.reasons) out << "  - " << reason << "\n";
  }
  if (!r.edit_history.empty()) {
    out << "\nedit history (oldest first):\n";
    std::size_t n = 0;
    for (const auto& h : r.edit_history) {
      out << "  " << ++n << ". " << timestamp_text(h) << "  " << h.manifest_label << "\n";
      out << "     generator: " << (h.claim_generator.empty() ? "unknown" : h.claim_generator) << "\n";
      if (h.action) out << "     action: " << *h.action << "\n";
      if (h.ingredient_digest) out << "     ingredient: " << to_hex(*h.ingredient_digest) << "\n";
      if (h.cycle_detected) out << "     note: ingredient graph revisits this manifest\n";
    }
  }
  out << "\nlayers:\n";
  for (const auto& e : r.layers) {
    out << "  " << to_string(e.layer) << ": ";
    const auto& t = r.timings_ms[static_cast<std::size_t>(e.layer)];
    if (!e.executed) {
      out << "not run\n";
      continue;
    }
    out << "ran";
    if (t) out << " in " << ms(*t) << " ms";
    out << "\n";
    for (const auto& f : e.findings) out << "    * " << f << "\n";
  }
  return out.str();
}

}  // namespace

std::string render_report(const Report& report, RenderMode mode, bool ansi) {
  return mode == RenderMode::Json ? render_json(report) : render_human(report, ansi);
}

}  // namespace originlens
