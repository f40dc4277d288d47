// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

// Decoding of the provenance store: assertions, claim, signature envelope
// and hard binding for each manifest, plus the ingredient graph.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "originlens/bytes.hpp"
#include "originlens/cbor.hpp"
#include "originlens/jumbf.hpp"
#include "originlens/timeutil.hpp"

namespace originlens {

struct AiSignatureRule;  // metadata.hpp

namespace c2pa {

// Description-box UUIDs: a four-character prefix followed by the fixed
// ISO suffix 0011-0010-8000-00AA00389B71.
constexpr jumbf::BoxUuid make_uuid(char a, char b, char c, char d) {
  return {static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b), static_cast<std::uint8_t>(c),
          static_cast<std::uint8_t>(d), 0x00, 0x11, 0x00, 0x10, 0x80, 0x00, 0x00, 0xAA, 0x00, 0x38, 0x9B,
          0x71};
}
inline constexpr jumbf::BoxUuid kStoreUuid = make_uuid('c', '2', 'p', 'a');
inline constexpr jumbf::BoxUuid kManifestUuid = make_uuid('c', '2', 'm', 'a');
inline constexpr jumbf::BoxUuid kAssertionStoreUuid = make_uuid('c', '2', 'a', 's');
inline constexpr jumbf::BoxUuid kClaimUuid = make_uuid('c', '2', 'c', 'l');
inline constexpr jumbf::BoxUuid kSignatureUuid = make_uuid('c', '2', 'c', 's');
inline constexpr jumbf::BoxUuid kCborUuid = make_uuid('c', 'b', 'o', 'r');
inline constexpr jumbf::BoxUuid kJsonUuid = make_uuid('j', 's', 'o', 'n');

inline constexpr char kStoreLabel[] = "c2pa";
inline constexpr char kAssertionStoreLabel[] = "c2pa.assertions";
inline constexpr char kClaimLabel[] = "c2pa.claim";
inline constexpr char kSignatureLabel[] = "c2pa.signature";
inline constexpr char kActionsLabel[] = "c2pa.actions";
inline constexpr char kHashDataLabel[] = "c2pa.hash.data";
inline constexpr char kCreativeWorkLabel[] = "stds.schema-org.CreativeWork";

inline constexpr char kAssertionUrlPrefix[] = "self#jumbf=c2pa.assertions/";
inline constexpr char kManifestUrlPrefix[] = "self#jumbf=/c2pa/";
inline constexpr char kSignatureUrl[] = "self#jumbf=c2pa.signature";

inline constexpr char kTrainedAlgorithmicMedia[] = "trainedAlgorithmicMedia";

}  // namespace c2pa

struct Assertion {
  std::string label;
  std::string content_type;  // type code of the content box, e.g. "cbor"
  Bytes payload;             // content box payload
  Bytes stored_bytes;        // the serialized assertion superbox
  std::optional<Digest256> declared_digest;

  /// Decoded payload for CBOR assertions. Throws CborError.
  cbor::Value decode_cbor() const;
};

struct AssertionRef {
  std::string label;
  Digest256 digest{};
};

struct IngredientRef {
  std::string uri;    // as written in the claim
  std::string label;  // manifest label when internal, else empty
  bool external = true;
  Digest256 digest{};
};

struct Claim {
  std::string claim_generator;
  std::string instance_id;
  std::vector<AssertionRef> assertion_refs;
  std::string signature_ref;
  std::vector<IngredientRef> ingredient_refs;
  std::optional<UtcTime> created_at;
};

enum class SignatureAlgorithm { ES256, RS256, Unsupported };

SignatureAlgorithm parse_signature_algorithm(std::string_view name);
const char* to_string(SignatureAlgorithm alg);

struct SignatureEnvelope {
  SignatureAlgorithm algorithm = SignatureAlgorithm::Unsupported;
  std::string algorithm_name;
  std::vector<Bytes> cert_chain;  // DER, leaf first; never empty once parsed
  Bytes signature_bytes;          // ES256: raw r||s; RS256: PKCS#1 v1.5
  Bytes signed_payload;           // the claim bytes exactly as stored
};

struct HardBinding {
  std::string hash_algorithm = "sha256";
  std::vector<ByteRange> exclusions;
  Digest256 expected_digest{};
};

struct Manifest {
  std::string label;
  std::vector<Assertion> assertions;
  Claim claim;
  Bytes claim_bytes;
  SignatureEnvelope signature;
  std::optional<HardBinding> hard_binding;
  /// Non-empty when the hash.data assertion exists but cannot be used.
  std::string hard_binding_error;
  /// SHA-256 over the serialized manifest superbox; ingredient references
  /// point at manifests by this digest.
  Digest256 box_digest{};

  const Assertion* find_assertion(std::string_view label) const;
};

struct ManifestStore {
  std::vector<Manifest> manifests;  // store order; the last one is active
  std::string active_label;

  const Manifest* find(std::string_view label) const;
  const Manifest& active() const;
};

/// Throws ManifestParseError.
ManifestStore parse_manifest_store(const jumbf::Box& root);

struct AssertionCheck {
  std::string label;
  bool digest_ok = false;
};

/// Recomputes each referenced assertion's digest and compares it to the
/// claim. Missing assertions report digest_ok = false.
std::vector<AssertionCheck> resolve_assertions(const Manifest& m);

struct EditHistoryEntry {
  std::string manifest_label;
  std::string claim_generator;
  std::optional<UtcTime> timestamp;
  std::optional<std::string> action;
  std::optional<Digest256> ingredient_digest;
  bool cycle_detected = false;
};

/// Oldest ingredient first, active manifest last. Each reachable manifest
/// appears once.
std::vector<EditHistoryEntry> extract_edit_history(const ManifestStore& store);

/// Generator name when the manifest declares generative origin, either
/// through a trained-algorithmic-media action or a claim_generator matching
/// the rule table.
std::optional<std::string> classify_generative_origin(const Manifest& m,
                                                      const std::vector<AiSignatureRule>& rules);
std::optional<std::string> classify_generative_origin(const Manifest& m);

// --- Builders shared with the fixture signer ----------------------------

cbor::Value claim_to_cbor(const Claim& claim);
cbor::Value hard_binding_to_cbor(const HardBinding& binding, std::size_t pad_length);
cbor::Value signature_to_cbor(const SignatureEnvelope& envelope);

}  // namespace originlens
