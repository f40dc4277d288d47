// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "originlens/bytes.hpp"
#include "originlens/container.hpp"
#include "originlens/manifest.hpp"
#include "originlens/timeutil.hpp"

namespace originlens {

Digest256 sha256(ByteView data);

/// Incremental SHA-256.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(ByteView data);
  Digest256 finish();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Sorts, drops empty ranges and merges overlapping or adjacent ones.
/// Throws RangeOutOfBounds when a range leaves [0, file_size].
std::vector<ByteRange> normalize_exclusions(std::vector<ByteRange> exclusions, std::uint64_t file_size);

/// SHA-256 over the image with the excluded ranges skipped. Throws
/// RangeOutOfBounds.
Digest256 compute_content_hash(const ImageBytes& image, const std::vector<ByteRange>& exclusions);

enum class BindingResult { Match, Mismatch };

struct BindingCheck {
  BindingResult result = BindingResult::Mismatch;
  std::string note;
};

BindingCheck verify_hard_binding(const HardBinding& binding, const ImageBytes& image);

// --- Certificates -------------------------------------------------------

struct RevokedSerial {
  Digest256 issuer_name_hash{};
  std::string serial_hex;  // lowercase, no leading zero bytes
  auto operator<=>(const RevokedSerial&) const = default;
};

/// Local trust anchors, leaf-key pins and revoked serials. Immutable once
/// built; an empty store rejects every chain.
class TrustStore {
 public:
  TrustStore() : TrustStore(std::vector<Bytes>{}) {}

  /// Each input is optional; missing files raise TrustMaterialError.
  static TrustStore load(std::span<const std::filesystem::path> root_pem_files,
                         const std::filesystem::path* pin_file, const std::filesystem::path* revocation_file);

  static std::vector<Bytes> parse_pem_bundle(std::string_view pem);
  static std::set<Digest256> parse_pin_list(std::string_view text);
  static std::set<RevokedSerial> parse_revocation_list(std::string_view text);

  TrustStore(std::vector<Bytes> roots, std::set<Digest256> pinned_spki_digests = {},
             std::set<RevokedSerial> revoked_serials = {});

  const std::vector<Bytes>& roots() const { return roots_; }
  const std::set<Digest256>& pinned_spki_digests() const { return pins_; }
  const std::set<RevokedSerial>& revoked_serials() const { return revoked_; }
  bool empty() const { return roots_.empty(); }

  struct Parsed;
  const Parsed& parsed() const { return *parsed_; }

 private:
  std::vector<Bytes> roots_;
  std::set<Digest256> pins_;
  std::set<RevokedSerial> revoked_;
  std::shared_ptr<const Parsed> parsed_;
};

enum class ChainStatus { Trusted, Untrusted, Expired, Revoked, PinMismatch, Malformed };

const char* to_string(ChainStatus status);

struct ChainResult {
  ChainStatus status = ChainStatus::Malformed;
  std::string leaf_subject;
  std::size_t chain_length = 0;
  std::vector<std::string> problems;
};

/// Status precedence when several defects apply:
/// Malformed > Revoked > Expired > PinMismatch > Untrusted.
ChainResult verify_chain(std::span<const Bytes> chain, const TrustStore& store, UtcTime now);

/// True iff the signature verifies over `canonical_claim` with the leaf key.
/// Throws UnsupportedAlgorithm.
bool verify_claim_signature(const SignatureEnvelope& envelope, ByteView canonical_claim);

struct CertificateInfo {
  std::string subject;
  std::string issuer;
  Digest256 spki_digest{};
  Digest256 issuer_name_hash{};
  std::string serial_hex;
  std::string not_before;
  std::string not_after;
};

/// Throws TrustMaterialError on undecodable DER.
CertificateInfo describe_certificate(ByteView der);

std::string der_to_pem(ByteView der);

}  // namespace originlens
