// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#include <openssl/core_names.h>
#include <openssl/hmac.h>
#include <openssl/param_build.h>
#include <openssl/rsa.h>

#include <stdexcept>

#include "../openssl_util.hpp"
#include "originlens/crypto_trust.hpp"
#include "originlens/errors.hpp"
#include "originlens/fixture_signer.hpp"

namespace originlens::fixture {

using namespace ossl;

namespace {

constexpr char kDocumentSigningOid[] = "1.3.6.1.5.5.7.3.36";
constexpr char kOrganization[] = "Origin Lens Fixtures";

Digest256 derive(std::string_view seed, std::string_view role) {
  std::string material(seed);
  material += '/';
  material += role;
  return sha256(as_bytes(material));
}

[[noreturn]] void fail(const std::string& what) { throw FixtureError(what + ": " + last_error()); }

PkeyPtr ed25519_from_seed(const Digest256& secret) {
  PkeyPtr key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, secret.data(), secret.size()));
  if (!key) fail("Ed25519 key derivation failed");
  return key;
}

struct P256 {
  EcGroupPtr group{EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1)};
  const BIGNUM* order() const { return EC_GROUP_get0_order(group.get()); }
};

Bytes bn_to_32(const BIGNUM* bn) {
  Bytes out(32);
  if (BN_bn2binpad(bn, out.data(), 32) != 32) throw FixtureError("scalar does not fit 32 bytes");
  return out;
}

// d = SHA-256(seed/role) mod n, never zero.
std::pair<PkeyPtr, Bytes> p256_from_seed(const Digest256& secret) {
  P256 curve;
  BnCtxPtr ctx(BN_CTX_new());
  BnPtr d(BN_bin2bn(secret.data(), static_cast<int>(secret.size()), nullptr));
  if (!curve.group || !ctx || !d || !BN_nnmod(d.get(), d.get(), curve.order(), ctx.get())) fail("P-256 setup failed");
  if (BN_is_zero(d.get())) BN_one(d.get());

  EcPointPtr pub(EC_POINT_new(curve.group.get()));
  if (!pub || !EC_POINT_mul(curve.group.get(), pub.get(), d.get(), nullptr, nullptr, ctx.get())) {
    fail("P-256 public key derivation failed");
  }
  unsigned char pub_oct[65];
  const std::size_t pub_len =
      EC_POINT_point2oct(curve.group.get(), pub.get(), POINT_CONVERSION_UNCOMPRESSED, pub_oct, sizeof pub_oct, ctx.get());
  if (pub_len != sizeof pub_oct) fail("P-256 point encoding failed");

  std::unique_ptr<OSSL_PARAM_BLD, Deleter<OSSL_PARAM_BLD, OSSL_PARAM_BLD_free>> bld(OSSL_PARAM_BLD_new());
  if (!bld || !OSSL_PARAM_BLD_push_utf8_string(bld.get(), OSSL_PKEY_PARAM_GROUP_NAME, "prime256v1", 0) ||
      !OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_PRIV_KEY, d.get()) ||
      !OSSL_PARAM_BLD_push_octet_string(bld.get(), OSSL_PKEY_PARAM_PUB_KEY, pub_oct, pub_len)) {
    fail("P-256 parameter build failed");
  }
  std::unique_ptr<OSSL_PARAM, Deleter<OSSL_PARAM, OSSL_PARAM_free>> params(OSSL_PARAM_BLD_to_param(bld.get()));
  PkeyCtxPtr pctx(EVP_PKEY_CTX_new_from_name(nullptr, "EC", nullptr));
  EVP_PKEY* raw = nullptr;
  if (!params || !pctx || EVP_PKEY_fromdata_init(pctx.get()) <= 0 ||
      EVP_PKEY_fromdata(pctx.get(), &raw, EVP_PKEY_KEYPAIR, params.get()) <= 0) {
    fail("P-256 key import failed");
  }
  return {PkeyPtr(raw), bn_to_32(d.get())};
}

// ECDSA with k = HMAC-SHA256(d, e || counter) mod n. Deterministic, which
// keeps fixture corpora byte-stable.
Bytes ecdsa_sign_deterministic(const Bytes& d_bytes, ByteView message) {
  P256 curve;
  BnCtxPtr ctx(BN_CTX_new());
  const Digest256 e_bytes = sha256(message);
  BnPtr e(BN_bin2bn(e_bytes.data(), 32, nullptr));
  BnPtr d(BN_bin2bn(d_bytes.data(), 32, nullptr));
  BnPtr k(BN_new()), r(BN_new()), s(BN_new()), x(BN_new()), tmp(BN_new());
  EcPointPtr point(EC_POINT_new(curve.group.get()));
  if (!ctx || !e || !d || !k || !r || !s || !x || !tmp || !point) fail("ECDSA setup failed");
  BN_nnmod(e.get(), e.get(), curve.order(), ctx.get());

  for (std::uint8_t counter = 0;; ++counter) {
    Bytes input(e_bytes.begin(), e_bytes.end());
    input.push_back(counter);
    unsigned char mac[32];
    unsigned int mac_len = 0;
    if (!HMAC(EVP_sha256(), d_bytes.data(), static_cast<int>(d_bytes.size()), input.data(), input.size(), mac,
              &mac_len)) {
      fail("HMAC failed");
    }
    BN_bin2bn(mac, static_cast<int>(mac_len), k.get());
    BN_nnmod(k.get(), k.get(), curve.order(), ctx.get());
    if (BN_is_zero(k.get())) continue;
    if (!EC_POINT_mul(curve.group.get(), point.get(), k.get(), nullptr, nullptr, ctx.get()) ||
        !EC_POINT_get_affine_coordinates(curve.group.get(), point.get(), x.get(), nullptr, ctx.get())) {
      fail("ECDSA point multiplication failed");
    }
    BN_nnmod(r.get(), x.get(), curve.order(), ctx.get());
    if (BN_is_zero(r.get())) continue;
    // s = k^-1 (e + r d) mod n
    if (!BN_mod_mul(tmp.get(), r.get(), d.get(), curve.order(), ctx.get()) ||
        !BN_mod_add(tmp.get(), tmp.get(), e.get(), curve.order(), ctx.get()) ||
        !BN_mod_inverse(k.get(), k.get(), curve.order(), ctx.get()) ||
        !BN_mod_mul(s.get(), k.get(), tmp.get(), curve.order(), ctx.get())) {
      fail("ECDSA arithmetic failed");
    }
    if (BN_is_zero(s.get())) continue;
    Bytes out = bn_to_32(r.get());
    Bytes s_bytes = bn_to_32(s.get());
    out.insert(out.end(), s_bytes.begin(), s_bytes.end());
    return out;
  }
}

NamePtr make_name(const std::string& cn) {
  NamePtr name(X509_NAME_new());
  if (!name ||
      !X509_NAME_add_entry_by_txt(name.get(), "O", MBSTRING_UTF8,
                                  reinterpret_cast<const unsigned char*>(kOrganization), -1, -1, 0) ||
      !X509_NAME_add_entry_by_txt(name.get(), "CN", MBSTRING_UTF8,
                                  reinterpret_cast<const unsigned char*>(cn.c_str()), -1, -1, 0)) {
    fail("name construction failed");
  }
  return name;
}

struct CertSpec {
  std::string common_name;
  Digest256 serial_source{};
  UtcTime not_before{};
  UtcTime not_after{};
  std::vector<std::pair<int, std::string>> extensions;  // (NID, config value)
};

// Signs `spec` for `subject_key` with `issuer_key`. A null issuer certificate
// means self-signed.
X509Ptr issue(const CertSpec& spec, EVP_PKEY* subject_key, EVP_PKEY* issuer_key, X509* issuer_cert) {
  X509Ptr cert(X509_new());
  if (!cert || !X509_set_version(cert.get(), 2)) fail("certificate allocation failed");

  Bytes serial(spec.serial_source.begin(), spec.serial_source.begin() + 9);
  serial[0] &= 0x7F;
  serial[0] |= 0x01;  // positive, and no leading zero byte
  BnPtr serial_bn(BN_bin2bn(serial.data(), static_cast<int>(serial.size()), nullptr));
  if (!serial_bn || !BN_to_ASN1_INTEGER(serial_bn.get(), X509_get_serialNumber(cert.get()))) fail("serial failed");

  NamePtr subject = make_name(spec.common_name);
  X509_set_subject_name(cert.get(), subject.get());
  X509_set_issuer_name(cert.get(), issuer_cert ? X509_get_subject_name(issuer_cert) : subject.get());
  if (!ASN1_TIME_set(X509_getm_notBefore(cert.get()), spec.not_before.time_since_epoch().count()) ||
      !ASN1_TIME_set(X509_getm_notAfter(cert.get()), spec.not_after.time_since_epoch().count())) {
    fail("validity encoding failed");
  }
  if (!X509_set_pubkey(cert.get(), subject_key)) fail("public key embedding failed");

  X509V3_CTX v3;
  X509V3_set_ctx_nodb(&v3);
  X509V3_set_ctx(&v3, issuer_cert ? issuer_cert : cert.get(), cert.get(), nullptr, nullptr, 0);
  for (const auto& [nid, value] : spec.extensions) {
    ExtPtr ext(X509V3_EXT_conf_nid(nullptr, &v3, nid, value.c_str()));
    if (!ext || !X509_add_ext(cert.get(), ext.get(), -1)) fail("extension " + value + " failed");
  }
  // Ed25519 takes no separate digest; RSA and EC issuers are not used here.
  if (X509_sign(cert.get(), issuer_key, nullptr) <= 0) fail("certificate signing failed");
  return cert;
}

UtcTime add_days(UtcTime t, int days) { return t + std::chrono::days(days); }

}  // namespace

struct SigningIdentity::Key {
  PkeyPtr pkey;
  Bytes ec_private;  // 32-byte scalar for ES256
};

struct TestCa::Keys {
  PkeyPtr root;
  PkeyPtr intermediate;
  X509Ptr root_cert;
  X509Ptr intermediate_cert;
};

UtcTime default_fixture_clock() { return *parse_rfc3339("2025-06-01T00:00:00Z"); }

Bytes SigningIdentity::sign(ByteView message) const {
  if (!key_) throw FixtureError("signing identity has no key");
  if (algorithm_ == SignatureAlgorithm::ES256) return ecdsa_sign_deterministic(key_->ec_private, message);
  MdCtxPtr ctx(EVP_MD_CTX_new());
  std::size_t len = 0;
  if (!ctx || EVP_DigestSignInit(ctx.get(), nullptr, EVP_sha256(), nullptr, key_->pkey.get()) <= 0 ||
      EVP_DigestSign(ctx.get(), nullptr, &len, message.data(), message.size()) <= 0) {
    fail("RSA signing setup failed");
  }
  Bytes out(len);
  if (EVP_DigestSign(ctx.get(), out.data(), &len, message.data(), message.size()) <= 0) fail("RSA signing failed");
  out.resize(len);
  return out;
}

TestCa TestCa::make(UtcTime now, int validity_days, std::string_view seed) {
  if (validity_days < 1) throw std::invalid_argument("validity_days must be at least 1");
  TestCa ca;
  ca.now_ = now;
  ca.validity_days_ = validity_days;
  ca.seed_ = std::string(seed);
  auto keys = std::make_shared<Keys>();
  keys->root = ed25519_from_seed(derive(seed, "root"));
  keys->intermediate = ed25519_from_seed(derive(seed, "intermediate"));

  const UtcTime not_after = add_days(now, validity_days);
  CertSpec root{"Origin Lens Test Root",
                derive(seed, "serial/root"),
                now,
                not_after,
                {{NID_basic_constraints, "critical,CA:TRUE"},
                 {NID_key_usage, "critical,keyCertSign,cRLSign"},
                 {NID_subject_key_identifier, "hash"}}};
  keys->root_cert = issue(root, keys->root.get(), keys->root.get(), nullptr);

  CertSpec intermediate{"Origin Lens Test Issuing CA",
                        derive(seed, "serial/intermediate"),
                        now,
                        not_after,
                        {{NID_basic_constraints, "critical,CA:TRUE,pathlen:0"},
                         {NID_key_usage, "critical,keyCertSign,cRLSign"},
                         {NID_subject_key_identifier, "hash"},
                         {NID_authority_key_identifier, "keyid:always"}}};
  keys->intermediate_cert = issue(intermediate, keys->intermediate.get(), keys->root.get(), keys->root_cert.get());

  ca.root_der_ = certificate_der(keys->root_cert.get());
  ca.intermediate_der_ = certificate_der(keys->intermediate_cert.get());
  ca.keys_ = std::move(keys);
  return ca;
}

std::string TestCa::root_pem() const { return der_to_pem(root_der_); }

SigningIdentity TestCa::issue_leaf(const LeafOptions& options) const {
  auto key = std::make_shared<SigningIdentity::Key>();
  if (options.algorithm == SignatureAlgorithm::ES256) {
    auto [pkey, scalar] = p256_from_seed(derive(seed_, "leaf/" + options.key_label));
    key->pkey = std::move(pkey);
    key->ec_private = std::move(scalar);
  } else if (options.algorithm == SignatureAlgorithm::RS256) {
    key->pkey.reset(EVP_RSA_gen(2048));
    if (!key->pkey) fail("RSA key generation failed");
  } else {
    throw std::invalid_argument("leaf algorithm must be ES256 or RS256");
  }

  const UtcTime not_before = options.not_before.value_or(now_);
  const UtcTime not_after = options.not_after.value_or(add_days(now_, validity_days_));
  CertSpec leaf{options.common_name,
                derive(seed_, "serial/leaf/" + options.key_label + "/" + options.common_name + "/" +
                                  format_rfc3339(not_before) + "/" + format_rfc3339(not_after)),
                not_before,
                not_after,
                {{NID_basic_constraints, "critical,CA:FALSE"},
                 {NID_key_usage, "critical,digitalSignature,nonRepudiation"},
                 {NID_subject_key_identifier, "hash"},
                 {NID_authority_key_identifier, "keyid:always"}}};
  if (options.document_signing_usage) leaf.extensions.emplace_back(NID_ext_key_usage, kDocumentSigningOid);
  auto cert = issue(leaf, key->pkey.get(), keys_->intermediate.get(), keys_->intermediate_cert.get());

  SigningIdentity id;
  id.algorithm_ = options.algorithm;
  id.chain_ = {certificate_der(cert.get()), intermediate_der_};
  id.key_ = std::move(key);
  return id;
}

}  // namespace originlens::fixture
