// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#include "originlens/manifest.hpp"

#include <map>

#include "originlens/crypto_trust.hpp"
#include "originlens/errors.hpp"
#include "originlens/metadata.hpp"

namespace originlens {

namespace {

const jumbf::Box* first_leaf(const jumbf::Box& superbox) {
  for (const auto& c : superbox.children) {
    if (!c.is_superbox()) return &c;
  }
  return nullptr;
}

cbor::Value decode_or_throw(ByteView bytes, const std::string& what) {
  try {
    return cbor::decode(bytes);
  } catch (const CborError& e) {
    throw ManifestParseError(what + " is not decodable CBOR: " + e.what());
  }
}

const std::string& required_text(const cbor::Value& map, std::string_view key, const std::string& what) {
  const cbor::Value* v = map.find(key);
  const std::string* t = v ? v->text() : nullptr;
  if (!t) throw ManifestParseError(what + " lacks text field '" + std::string(key) + "'");
  return *t;
}

Digest256 required_digest(const cbor::Value& map, std::string_view key, const std::string& what) {
  const cbor::Value* v = map.find(key);
  const Bytes* b = v ? v->bytes() : nullptr;
  if (!b || b->size() != 32) throw ManifestParseError(what + " lacks a 32-byte '" + std::string(key) + "'");
  Digest256 d{};
  std::copy(b->begin(), b->end(), d.begin());
  return d;
}

std::string label_from_assertion_url(const std::string& url) {
  std::string_view prefix = c2pa::kAssertionUrlPrefix;
  if (url.starts_with(prefix)) return url.substr(prefix.size());
  return url;
}

Claim decode_claim(const cbor::Value& v) {
  if (!v.map()) throw ManifestParseError("claim is not a CBOR map");
  Claim claim;
  claim.claim_generator = required_text(v, "claim_generator", "claim");
  if (const auto* id = v.find("instance_id"); id && id->text()) claim.instance_id = *id->text();
  if (const auto* sig = v.find("signature"); sig && sig->text()) claim.signature_ref = *sig->text();
  if (const auto* alg = v.find("alg"); alg && (!alg->text() || *alg->text() != "sha256")) {
    throw ManifestParseError("claim hash algorithm must be sha256");
  }
  if (const auto* ts = v.find("created_at"); ts && ts->text()) claim.created_at = parse_rfc3339(*ts->text());

  const cbor::Value* refs = v.find("assertions");
  if (!refs || !refs->array()) throw ManifestParseError("claim lacks an assertions array");
  for (const auto& ref : *refs->array()) {
    // Locals first: GCC before 13 leaks built members when a braced
    // aggregate initializer throws.
    std::string label = label_from_assertion_url(required_text(ref, "url", "assertion reference"));
    const Digest256 digest = required_digest(ref, "hash", "assertion reference");
    claim.assertion_refs.push_back({std::move(label), digest});
  }
  if (const auto* ingredients = v.find("ingredients")) {
    if (!ingredients->array()) throw ManifestParseError("claim ingredients is not an array");
    for (const auto& ref : *ingredients->array()) {
      IngredientRef r;
      r.uri = required_text(ref, "url", "ingredient reference");
      r.digest = required_digest(ref, "hash", "ingredient reference");
      claim.ingredient_refs.push_back(std::move(r));
    }
  }
  return claim;
}

SignatureEnvelope decode_signature(const cbor::Value& v, const Bytes& claim_bytes) {
  if (!v.map()) throw ManifestParseError("signature is not a CBOR map");
  SignatureEnvelope env;
  env.algorithm_name = required_text(v, "alg", "signature");
  env.algorithm = parse_signature_algorithm(env.algorithm_name);
  const cbor::Value* chain = v.find("x5chain");
  if (!chain || !chain->array() || chain->array()->empty()) {
    throw ManifestParseError("signature lacks a certificate chain");
  }
  for (const auto& cert : *chain->array()) {
    if (!cert.bytes()) throw ManifestParseError("x5chain entry is not a byte string");
    env.cert_chain.push_back(*cert.bytes());
  }
  const cbor::Value* sig = v.find("signature");
  if (!sig || !sig->bytes()) throw ManifestParseError("signature lacks signature bytes");
  env.signature_bytes = *sig->bytes();
  env.signed_payload = claim_bytes;
  return env;
}

HardBinding decode_hard_binding(const cbor::Value& v) {
  if (!v.map()) throw ManifestParseError("hash.data is not a CBOR map");
  HardBinding b;
  b.hash_algorithm = required_text(v, "alg", "hash.data");
  if (b.hash_algorithm != "sha256") throw ManifestParseError("hash.data algorithm must be sha256");
  b.expected_digest = required_digest(v, "hash", "hash.data");
  if (const auto* ex = v.find("exclusions")) {
    if (!ex->array()) throw ManifestParseError("hash.data exclusions is not an array");
    for (const auto& e : *ex->array()) {
      const auto* start = e.find("start");
      const auto* length = e.find("length");
      if (!start || !start->uint() || !length || !length->uint()) {
        throw ManifestParseError("hash.data exclusion needs unsigned start and length");
      }
      b.exclusions.push_back({*start->uint(), *length->uint()});
    }
  }
  return b;
}

Manifest parse_manifest(const jumbf::Box& box) {
  if (!box.label || box.label->empty()) throw ManifestParseError("manifest superbox without a label");
  Manifest m;
  m.label = *box.label;
  m.box_digest = sha256(jumbf::serialize_box_tree(box));

  if (const auto* store = box.child(c2pa::kAssertionStoreLabel)) {
    for (const auto& a : store->children) {
      if (!a.is_superbox() || !a.label) continue;
      Assertion assertion;
      assertion.label = *a.label;
      if (const auto* leaf = first_leaf(a)) {
        assertion.content_type = leaf->type;
        assertion.payload = leaf->payload;
      }
      assertion.stored_bytes = jumbf::serialize_box_tree(a);
      m.assertions.push_back(std::move(assertion));
    }
  }

  const auto* claim_box = box.child(c2pa::kClaimLabel);
  const auto* claim_leaf = claim_box ? first_leaf(*claim_box) : nullptr;
  if (!claim_leaf) throw ManifestParseError("manifest '" + m.label + "' has no claim box");
  m.claim_bytes = claim_leaf->payload;
  m.claim = decode_claim(decode_or_throw(m.claim_bytes, "claim"));
  for (const auto& ref : m.claim.assertion_refs) {
    for (auto& a : m.assertions) {
      if (a.label == ref.label && !a.declared_digest) a.declared_digest = ref.digest;
    }
  }

  const auto* sig_box = box.child(c2pa::kSignatureLabel);
  const auto* sig_leaf = sig_box ? first_leaf(*sig_box) : nullptr;
  if (!sig_leaf) throw ManifestParseError("manifest '" + m.label + "' has no signature box");
  m.signature = decode_signature(decode_or_throw(sig_leaf->payload, "signature"), m.claim_bytes);

  if (const auto* binding = m.find_assertion(c2pa::kHashDataLabel)) {
    try {
      m.hard_binding = decode_hard_binding(binding->decode_cbor());
    } catch (const Error& e) {
      m.hard_binding_error = e.what();
    }
  }
  return m;
}

}  // namespace

cbor::Value Assertion::decode_cbor() const { return cbor::decode(payload); }

SignatureAlgorithm parse_signature_algorithm(std::string_view name) {
  if (name == "ES256") return SignatureAlgorithm::ES256;
  if (name == "RS256") return SignatureAlgorithm::RS256;
  return SignatureAlgorithm::Unsupported;
}

const char* to_string(SignatureAlgorithm alg) {
  switch (alg) {
    case SignatureAlgorithm::ES256:
      return "ES256";
    case SignatureAlgorithm::RS256:
      return "RS256";
    case SignatureAlgorithm::Unsupported:
      break;
  }
  return "unsupported";
}

const Assertion* Manifest::find_assertion(std::string_view label) const {
  for (const auto& a : assertions) {
    if (a.label == label) return &a;
  }
  return nullptr;
}

const Manifest* ManifestStore::find(std::string_view label) const {
  for (const auto& m : manifests) {
    if (m.label == label) return &m;
  }
  return nullptr;
}

const Manifest& ManifestStore::active() const {
  const Manifest* m = find(active_label);
  if (!m) throw ManifestParseError("active manifest missing");
  return *m;
}

ManifestStore parse_manifest_store(const jumbf::Box& root) {
  if (!root.is_superbox() || root.label != std::string(c2pa::kStoreLabel)) {
    throw ManifestParseError("root box is not a c2pa manifest store");
  }
  ManifestStore store;
  for (const auto& child : root.children) {
    if (!child.is_superbox()) continue;
    Manifest m = parse_manifest(child);
    if (store.find(m.label)) throw ManifestParseError("duplicate manifest label '" + m.label + "'");
    store.manifests.push_back(std::move(m));
  }
  if (store.manifests.empty()) throw ManifestParseError("manifest store holds no manifests");
  store.active_label = store.manifests.back().label;

  std::string_view prefix = c2pa::kManifestUrlPrefix;
  for (auto& m : store.manifests) {
    for (auto& ref : m.claim.ingredient_refs) {
      if (ref.uri.starts_with(prefix)) {
        std::string label = ref.uri.substr(prefix.size());
        if (store.find(label)) {
          ref.label = std::move(label);
          ref.external = false;
        }
      }
    }
  }
  return store;
}

std::vector<AssertionCheck> resolve_assertions(const Manifest& m) {
  std::vector<AssertionCheck> out;
  out.reserve(m.claim.assertion_refs.size());
  for (const auto& ref : m.claim.assertion_refs) {
    const Assertion* a = m.find_assertion(ref.label);
    out.push_back({ref.label, a != nullptr && sha256(a->stored_bytes) == ref.digest});
  }
  return out;
}

std::vector<EditHistoryEntry> extract_edit_history(const ManifestStore& store) {
  const auto n = store.manifests.size();
  std::map<std::string, std::size_t, std::less<>> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(store.manifests[i].label, i);
  auto active = index.find(store.active_label);
  if (active == index.end()) return {};

  enum class State { Unvisited, OnStack, Done };
  std::vector<State> state(n, State::Unvisited);
  std::vector<bool> cycle(n, false);
  std::vector<EditHistoryEntry> history;

  auto make_entry = [&](std::size_t i) {
    const Manifest& m = store.manifests[i];
    EditHistoryEntry e;
    e.manifest_label = m.label;
    e.claim_generator = m.claim.claim_generator;
    e.timestamp = m.claim.created_at;
    if (const auto* actions = m.find_assertion(c2pa::kActionsLabel)) {
      try {
        auto v = actions->decode_cbor();
        const auto* list = v.find("actions");
        if (list && list->array() && !list->array()->empty()) {
          if (const auto* a = list->array()->front().find("action"); a && a->text()) e.action = *a->text();
        }
      } catch (const CborError&) {
      }
    }
    if (!m.claim.ingredient_refs.empty()) e.ingredient_digest = m.claim.ingredient_refs.front().digest;
    e.cycle_detected = cycle[i];
    return e;
  };

  // Iterative post-order walk: (manifest index, next ingredient to visit).
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  stack.emplace_back(active->second, 0);
  state[active->second] = State::OnStack;
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    const auto& refs = store.manifests[node].claim.ingredient_refs;
    if (next < refs.size()) {
      const auto& ref = refs[next++];
      if (ref.external) continue;
      auto it = index.find(ref.label);
      if (it == index.end()) continue;
      const std::size_t child = it->second;
      if (state[child] == State::OnStack) {
        cycle[child] = true;
      } else if (state[child] == State::Unvisited) {
        state[child] = State::OnStack;
        stack.emplace_back(child, 0);
      }
      continue;
    }
    state[node] = State::Done;
    history.push_back(make_entry(node));
    stack.pop_back();
  }
  return history;
}

std::optional<std::string> classify_generative_origin(const Manifest& m,
                                                      const std::vector<AiSignatureRule>& rules) {
  if (const auto* actions = m.find_assertion(c2pa::kActionsLabel)) {
    try {
      auto v = actions->decode_cbor();
      const auto* list = v.find("actions");
      if (list && list->array()) {
        for (const auto& action : *list->array()) {
          const auto* source = action.find("digitalSourceType");
          if (!source || !source->text() ||
              find_case_insensitive(*source->text(), c2pa::kTrainedAlgorithmicMedia) == std::string::npos) {
            continue;
          }
          if (const auto* agent = action.find("softwareAgent")) {
            if (agent->text() && !agent->text()->empty()) return *agent->text();
            if (const auto* name = agent->find("name"); name && name->text() && !name->text()->empty()) {
              return *name->text();
            }
          }
          if (!m.claim.claim_generator.empty()) return m.claim.claim_generator;
          return std::string("unknown generator");
        }
      }
    } catch (const CborError&) {
    }
  }
  for (const auto& rule : rules) {
    if (rule.field_scope != FieldScope::ClaimGenerator && rule.field_scope != FieldScope::AnyText) continue;
    if (find_case_insensitive(m.claim.claim_generator, rule.pattern) != std::string::npos) {
      return rule.generator_name;
    }
  }
  return std::nullopt;
}

std::optional<std::string> classify_generative_origin(const Manifest& m) {
  return classify_generative_origin(m, default_rule_table());
}

cbor::Value claim_to_cbor(const Claim& claim) {
  cbor::Value::Array refs;
  for (const auto& r : claim.assertion_refs) {
    refs.push_back(cbor::Value::object({{"url", std::string(c2pa::kAssertionUrlPrefix) + r.label},
                                        {"hash", Bytes(r.digest.begin(), r.digest.end())}}));
  }
  cbor::Value::Map map;
  map.emplace_back("claim_generator", claim.claim_generator);
  map.emplace_back("instance_id", claim.instance_id);
  map.emplace_back("signature", claim.signature_ref);
  map.emplace_back("alg", "sha256");
  map.emplace_back("assertions", std::move(refs));
  if (!claim.ingredient_refs.empty()) {
    cbor::Value::Array ingredients;
    for (const auto& r : claim.ingredient_refs) {
      ingredients.push_back(cbor::Value::object({{"url", r.uri}, {"hash", Bytes(r.digest.begin(), r.digest.end())}}));
    }
    map.emplace_back("ingredients", std::move(ingredients));
  }
  if (claim.created_at) map.emplace_back("created_at", format_rfc3339(*claim.created_at));
  return cbor::Value(std::move(map));
}

cbor::Value hard_binding_to_cbor(const HardBinding& binding, std::size_t pad_length) {
  cbor::Value::Array exclusions;
  for (const auto& r : binding.exclusions) {
    exclusions.push_back(cbor::Value::object({{"start", r.offset}, {"length", r.length}}));
  }
  return cbor::Value::object({{"alg", binding.hash_algorithm},
                              {"name", "jumbf manifest"},
                              {"hash", Bytes(binding.expected_digest.begin(), binding.expected_digest.end())},
                              {"exclusions", std::move(exclusions)},
                              {"pad", Bytes(pad_length, 0)}});
}

cbor::Value signature_to_cbor(const SignatureEnvelope& envelope) {
  cbor::Value::Array chain;
  for (const auto& c : envelope.cert_chain) chain.emplace_back(c);
  return cbor::Value::object({{"alg", envelope.algorithm_name},
                              {"x5chain", std::move(chain)},
                              {"signature", envelope.signature_bytes}});
}

}  // namespace originlens
