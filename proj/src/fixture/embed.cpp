// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#include <stdexcept>

#include "originlens/crypto_trust.hpp"
#include "originlens/errors.hpp"
#include "originlens/fixture_signer.hpp"

namespace originlens::fixture {

namespace {

constexpr char kSourceTypeBase[] = "http://cv.iptc.org/newscodes/digitalsourcetype/";
constexpr std::size_t kBindingPad = 16;

std::size_t cbor_uint_size(std::uint64_t v) {
  if (v < 24) return 1;
  if (v < 0x100) return 2;
  if (v < 0x10000) return 3;
  if (v <= 0xFFFFFFFFull) return 5;
  return 9;
}

std::string derived_label(ByteView base, const std::string& generator, UtcTime now, std::size_t prior) {
  std::string material = to_hex(sha256(base)) + "|" + generator + "|" + format_rfc3339(now) + "|" +
                         std::to_string(prior);
  Digest256 h = sha256(as_bytes(material));
  h[6] = static_cast<std::uint8_t>((h[6] & 0x0F) | 0x40);
  h[8] = static_cast<std::uint8_t>((h[8] & 0x3F) | 0x80);
  const std::string hex = to_hex(ByteView(h.data(), 16));
  return "urn:uuid:" + hex.substr(0, 8) + "-" + hex.substr(8, 4) + "-" + hex.substr(12, 4) + "-" +
         hex.substr(16, 4) + "-" + hex.substr(20, 12);
}

jumbf::Box cbor_assertion_box(const std::string& label, const cbor::Value& content) {
  return jumbf::make_superbox(c2pa::kCborUuid, label, {jumbf::make_leaf("cbor", cbor::encode(content))});
}

Bytes carrier_bytes(ImageFormat format, const Bytes& jumbf) {
  Bytes out;
  if (format == ImageFormat::Jpeg) {
    for (const auto& payload : split_jumbf_into_app11(jumbf)) {
      out.push_back(0xFF);
      out.push_back(jpeg::kApp11);
      append_be16(out, static_cast<std::uint16_t>(payload.size() + 2));
      out.insert(out.end(), payload.begin(), payload.end());
    }
  } else {
    append_be32(out, static_cast<std::uint32_t>(jumbf.size()));
    Bytes typed(png::kProvenanceChunk, png::kProvenanceChunk + 4);
    typed.insert(typed.end(), jumbf.begin(), jumbf.end());
    out.insert(out.end(), typed.begin(), typed.end());
    append_be32(out, png::crc32(typed));
  }
  return out;
}

std::size_t insertion_offset(const ImageBytes& base) {
  if (base.format() == ImageFormat::Jpeg) return 2;
  auto chunks = scan_png_chunks(base);
  if (chunks.empty() || chunks.front().type_code != "IHDR") throw FixtureError("PNG does not start with IHDR");
  return static_cast<std::size_t>(chunks.front().total_range.end());
}

Bytes splice(ByteView base, std::size_t at, const Bytes& carrier) {
  Bytes out(base.begin(), base.begin() + static_cast<std::ptrdiff_t>(at));
  out.insert(out.end(), carrier.begin(), carrier.end());
  out.insert(out.end(), base.begin() + static_cast<std::ptrdiff_t>(at), base.end());
  return out;
}

struct ManifestDraft {
  std::string label;
  std::vector<jumbf::Box> prior;  // earlier manifests kept in the store
  std::vector<jumbf::Box> assertion_boxes;
  Claim claim;
};

// Serializes the whole store for one binding value and signature.
Bytes build_store(const ManifestDraft& draft, const HardBinding& binding, std::size_t pad,
                  const SigningIdentity& identity, bool sign, std::size_t signature_size) {
  std::vector<jumbf::Box> assertions = draft.assertion_boxes;
  assertions.push_back(cbor_assertion_box(c2pa::kHashDataLabel, hard_binding_to_cbor(binding, pad)));

  Claim claim = draft.claim;
  for (const auto& box : assertions) {
    claim.assertion_refs.push_back({*box.label, sha256(jumbf::serialize_box_tree(box))});
  }
  Bytes claim_bytes = cbor::encode(claim_to_cbor(claim));

  SignatureEnvelope env;
  env.algorithm = identity.algorithm();
  env.algorithm_name = to_string(env.algorithm);
  env.cert_chain = identity.cert_chain();
  env.signature_bytes = sign ? identity.sign(claim_bytes) : Bytes(signature_size, 0);

  std::vector<jumbf::Box> manifest_children;
  manifest_children.push_back(
      jumbf::make_superbox(c2pa::kAssertionStoreUuid, std::string(c2pa::kAssertionStoreLabel), std::move(assertions)));
  manifest_children.push_back(jumbf::make_superbox(c2pa::kClaimUuid, std::string(c2pa::kClaimLabel),
                                                   {jumbf::make_leaf("cbor", claim_bytes)}));
  manifest_children.push_back(jumbf::make_superbox(c2pa::kSignatureUuid, std::string(c2pa::kSignatureLabel),
                                                   {jumbf::make_leaf("cbor", cbor::encode(signature_to_cbor(env)))}));

  std::vector<jumbf::Box> manifests = draft.prior;
  manifests.push_back(jumbf::make_superbox(c2pa::kManifestUuid, draft.label, std::move(manifest_children)));
  return jumbf::serialize_box_tree(
      jumbf::make_superbox(c2pa::kStoreUuid, std::string(c2pa::kStoreLabel), std::move(manifests)));
}

cbor::Value actions_value(const std::string& action, const std::string& source_type, const std::string& agent) {
  return cbor::Value::object(
      {{"actions", cbor::Value::Array{cbor::Value::object({{"action", action},
                                                             {"digitalSourceType", kSourceTypeBase + source_type},
                                                             {"softwareAgent", agent}})}}});
}

}  // namespace

AssertionSpec capture_actions(const std::string& software_agent) {
  return {c2pa::kActionsLabel, actions_value("c2pa.created", "digitalCapture", software_agent)};
}

AssertionSpec generative_actions(const std::string& software_agent) {
  return {c2pa::kActionsLabel, actions_value("c2pa.created", c2pa::kTrainedAlgorithmicMedia, software_agent)};
}

AssertionSpec edit_actions(const std::string& action, const std::string& software_agent) {
  return {c2pa::kActionsLabel,
          cbor::Value::object({{"actions", cbor::Value::Array{cbor::Value::object(
                                               {{"action", action}, {"softwareAgent", software_agent}})}}})};
}

ImageBytes sign_and_embed(const ImageBytes& image, const SigningIdentity& identity,
                          const std::vector<AssertionSpec>& assertions, const std::string& claim_generator,
                          UtcTime now, const EmbedOptions& options) {
  if (image.format() == ImageFormat::Unknown) throw UnsupportedFormat("fixture signing needs a JPEG or PNG input");

  ManifestDraft draft;
  std::optional<IngredientRef> ingredient;
  if (options.chain_existing) {
    if (auto carrier = extract_jumbf(image)) {
      auto root = jumbf::parse_box_tree(carrier->jumbf);
      auto store = parse_manifest_store(root);
      for (const auto& child : root.children) {
        if (child.is_superbox()) draft.prior.push_back(child);
      }
      const Manifest& active = store.active();
      ingredient = IngredientRef{std::string(c2pa::kManifestUrlPrefix) + active.label, active.label, false,
                                 active.box_digest};
    }
  }

  const ImageBytes base(strip_provenance(image));
  const std::size_t at = insertion_offset(base);
  draft.label = options.manifest_label.value_or(derived_label(base.bytes(), claim_generator, now, draft.prior.size()));
  for (const auto& a : assertions) draft.assertion_boxes.push_back(cbor_assertion_box(a.label, a.content));
  draft.claim.claim_generator = claim_generator;
  draft.claim.instance_id = "xmp:iid:" + draft.label.substr(draft.label.rfind(':') + 1);
  draft.claim.signature_ref = c2pa::kSignatureUrl;
  draft.claim.created_at = now;
  if (ingredient) draft.claim.ingredient_refs.push_back(*ingredient);

  const std::size_t sig_size = identity.sign(as_bytes("size probe")).size();

  // Pass 1: size the carrier with a zero-length exclusion.
  HardBinding binding;
  binding.exclusions = {{at, 0}};
  const std::size_t carrier_size =
      carrier_bytes(base.format(), build_store(draft, binding, kBindingPad, identity, false, sig_size)).size();

  // Pass 2: the real exclusion may encode longer; the pad absorbs the growth.
  binding.exclusions = {{at, carrier_size}};
  const std::size_t growth = cbor_uint_size(carrier_size) - cbor_uint_size(0);
  const std::size_t pad = kBindingPad - growth;
  Bytes placeholder = carrier_bytes(base.format(), build_store(draft, binding, pad, identity, false, sig_size));
  if (placeholder.size() != carrier_size) throw FixtureError("carrier size changed between passes");
  const ImageBytes reserved(splice(base.bytes(), at, placeholder));
  binding.expected_digest = compute_content_hash(reserved, binding.exclusions);

  Bytes carrier = carrier_bytes(base.format(), build_store(draft, binding, pad, identity, true, sig_size));
  if (carrier.size() != carrier_size) throw FixtureError("signed carrier does not fit its reservation");
  ImageBytes out(splice(base.bytes(), at, carrier));
  if (compute_content_hash(out, binding.exclusions) != binding.expected_digest) {
    throw FixtureError("embedded binding does not reproduce");
  }
  return out;
}

ImageBytes make_ingredient_chain(const ImageBytes& base, int steps, const SigningIdentity& identity, UtcTime now) {
  if (steps < 1) throw std::invalid_argument("steps must be at least 1");
  ImageBytes current = base;
  for (int i = 0; i < steps; ++i) {
    const auto when = now + std::chrono::hours(i);
    const bool first = i == 0;
    auto assertion = first ? capture_actions("Origin Lens Fixture Camera")
                           : edit_actions(i % 2 ? "c2pa.color_adjusted" : "c2pa.cropped", "Origin Lens Fixture Editor");
    EmbedOptions options;
    options.chain_existing = !first;
    current = sign_and_embed(current, identity, {assertion}, "Origin Lens Fixture Step " + std::to_string(i + 1), when,
                             options);
  }
  return current;
}

}  // namespace originlens::fixture
