// Copyright 2026 The Origin Lens Authors
// SPDX-License-Identifier: Apache-2.0

#include "originlens/crypto_trust.hpp"

#include <openssl/pem.h>

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "openssl_util.hpp"
#include "originlens/errors.hpp"

namespace originlens {

namespace {

using ossl::X509Ptr;

constexpr char kDocumentSigningOid[] = "1.3.6.1.5.5.7.3.36";

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TrustMaterialError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename Fn>
void for_each_data_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    fn(line, line_no);
  }
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

Digest256 spki_digest_of(X509* cert) {
  unsigned char* der = nullptr;
  int len = i2d_X509_PUBKEY(X509_get_X509_PUBKEY(cert), &der);
  if (len <= 0) return {};
  Digest256 d = sha256(ByteView{der, static_cast<std::size_t>(len)});
  OPENSSL_free(der);
  return d;
}

Digest256 issuer_hash_of(X509* cert) {
  unsigned char* der = nullptr;
  int len = i2d_X509_NAME(X509_get_issuer_name(cert), &der);
  if (len <= 0) return {};
  Digest256 d = sha256(ByteView{der, static_cast<std::size_t>(len)});
  OPENSSL_free(der);
  return d;
}

std::string serial_hex_of(X509* cert) {
  ossl::BnPtr bn(ASN1_INTEGER_to_BN(X509_get0_serialNumber(cert), nullptr));
  if (!bn) return {};
  Bytes raw(static_cast<std::size_t>(BN_num_bytes(bn.get())));
  BN_bn2bin(bn.get(), raw.data());
  return raw.empty() ? "00" : to_hex(raw);
}

std::string asn1_time_string(const ASN1_TIME* t) {
  std::tm tm{};
  if (ASN1_TIME_to_tm(t, &tm) != 1) return {};
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

bool issued_by(X509* child, X509* parent) {
  if (X509_NAME_cmp(X509_get_issuer_name(child), X509_get_subject_name(parent)) != 0) return false;
  EVP_PKEY* key = X509_get0_pubkey(parent);
  bool ok = key && X509_verify(child, key) == 1;
  ERR_clear_error();
  return ok;
}

bool has_signing_usage(X509* leaf) {
  auto* eku = static_cast<EXTENDED_KEY_USAGE*>(X509_get_ext_d2i(leaf, NID_ext_key_usage, nullptr, nullptr));
  if (!eku) return false;
  bool found = false;
  for (int i = 0; i < sk_ASN1_OBJECT_num(eku); ++i) {
    ASN1_OBJECT* obj = sk_ASN1_OBJECT_value(eku, i);
    char oid[80];
    OBJ_obj2txt(oid, sizeof oid, obj, 1);
    if (OBJ_obj2nid(obj) == NID_email_protect || std::string_view(oid) == kDocumentSigningOid) found = true;
  }
  EXTENDED_KEY_USAGE_free(eku);
  return found;
}

Bytes raw_ecdsa_to_der(ByteView raw) {
  ossl::EcSigPtr sig(ECDSA_SIG_new());
  BIGNUM* r = BN_bin2bn(raw.data(), 32, nullptr);
  BIGNUM* s = BN_bin2bn(raw.data() + 32, 32, nullptr);
  if (!sig || !r || !s || ECDSA_SIG_set0(sig.get(), r, s) != 1) {
    BN_free(r);
    BN_free(s);
    return {};
  }
  int len = i2d_ECDSA_SIG(sig.get(), nullptr);
  if (len <= 0) return {};
  Bytes der(static_cast<std::size_t>(len));
  unsigned char* p = der.data();
  i2d_ECDSA_SIG(sig.get(), &p);
  return der;
}

bool is_p256(EVP_PKEY* key) {
  char curve[64] = {};
  std::size_t len = 0;
  if (EVP_PKEY_get_utf8_string_param(key, "group", curve, sizeof curve, &len) != 1) return false;
  return std::string_view(curve, len) == "prime256v1" || std::string_view(curve, len) == "P-256";
}

}  // namespace

// --- Hashing --------------------------------------------------------------

struct Sha256::Impl {
  ossl::MdCtxPtr ctx{EVP_MD_CTX_new()};
};

Sha256::Sha256() : impl_(std::make_unique<Impl>()) {
  if (!impl_->ctx || EVP_DigestInit_ex(impl_->ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 initialisation failed");
  }
}

Sha256::~Sha256() = default;

void Sha256::update(ByteView data) {
  if (!data.empty()) EVP_DigestUpdate(impl_->ctx.get(), data.data(), data.size());
}

Digest256 Sha256::finish() {
  Digest256 out{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(impl_->ctx.get(), out.data(), &len);
  return out;
}

Digest256 sha256(ByteView data) {
  Sha256 h;
  h.update(data);
  return h.finish();
}

std::vector<ByteRange> normalize_exclusions(std::vector<ByteRange> exclusions, std::uint64_t file_size) {
  for (const auto& r : exclusions) {
    if (r.offset > file_size || r.length > file_size - r.offset) {
      throw RangeOutOfBounds("exclusion [" + std::to_string(r.offset) + ", +" + std::to_string(r.length) +
                             ") exceeds file size " + std::to_string(file_size));
    }
  }
  std::erase_if(exclusions, [](const ByteRange& r) { return r.length == 0; });
  std::sort(exclusions.begin(), exclusions.end());
  std::vector<ByteRange> merged;
  for (const auto& r : exclusions) {
    if (!merged.empty() && r.offset <= merged.back().end()) {
      merged.back().length = std::max(merged.back().end(), r.end()) - merged.back().offset;
    } else {
      merged.push_back(r);
    }
  }
  return merged;
}

Digest256 compute_content_hash(const ImageBytes& image, const std::vector<ByteRange>& exclusions) {
  auto data = image.bytes();
  auto ranges = normalize_exclusions(exclusions, data.size());
  Sha256 h;
  std::uint64_t pos = 0;
  for (const auto& r : ranges) {
    h.update(data.subspan(pos, r.offset - pos));
    pos = r.end();
  }
  h.update(data.subspan(pos));
  return h.finish();
}

BindingCheck verify_hard_binding(const HardBinding& binding, const ImageBytes& image) {
  if (binding.hash_algorithm != "sha256") {
    return {BindingResult::Mismatch, "unsupported binding hash algorithm " + binding.hash_algorithm};
  }
  try {
    auto digest = compute_content_hash(image, binding.exclusions);
    if (digest == binding.expected_digest) return {BindingResult::Match, {}};
    return {BindingResult::Mismatch, "content hash " + to_hex(digest) + " differs from the bound digest"};
  } catch (const RangeOutOfBounds& e) {
    return {BindingResult::Mismatch, std::string("binding cannot cover this file: ") + e.what()};
  }
}

// --- Trust store ----------------------------------------------------------

struct TrustStore::Parsed {
  std::vector<std::shared_ptr<X509>> roots;
};

TrustStore::TrustStore(std::vector<Bytes> roots, std::set<Digest256> pinned_spki_digests,
                       std::set<RevokedSerial> revoked_serials)
    : roots_(std::move(roots)), pins_(std::move(pinned_spki_digests)), revoked_(std::move(revoked_serials)) {
  auto parsed = std::make_shared<Parsed>();
  for (const auto& der : roots_) {
    auto cert = ossl::parse_der_certificate(der);
    if (!cert) throw TrustMaterialError("trust store contains an undecodable certificate");
    parsed->roots.emplace_back(cert.release(), X509_free);
  }
  parsed_ = std::move(parsed);
}

std::vector<Bytes> TrustStore::parse_pem_bundle(std::string_view pem) {
  std::vector<Bytes> out;
  ossl::BioPtr bio(BIO_new_mem_buf(pem.data(), static_cast<int>(pem.size())));
  while (true) {
    X509Ptr cert(PEM_read_bio_X509(bio.get(), nullptr, nullptr, nullptr));
    if (!cert) break;
    out.push_back(ossl::certificate_der(cert.get()));
  }
  unsigned long err = ERR_peek_last_error();
  ERR_clear_error();
  // End of input shows up as PEM_R_NO_START_LINE; anything else is damage.
  if (err != 0 && ERR_GET_REASON(err) != PEM_R_NO_START_LINE) {
    throw TrustMaterialError("malformed PEM certificate bundle");
  }
  return out;
}

std::set<Digest256> TrustStore::parse_pin_list(std::string_view text) {
  std::set<Digest256> pins;
  for_each_data_line(text, [&](std::string_view line, std::size_t no) {
    auto d = digest_from_hex(line);
    if (!d) throw TrustMaterialError("pin list line " + std::to_string(no) + " is not a 64-digit hex digest");
    pins.insert(*d);
  });
  return pins;
}

std::set<RevokedSerial> TrustStore::parse_revocation_list(std::string_view text) {
  std::set<RevokedSerial> out;
  for_each_data_line(text, [&](std::string_view line, std::size_t no) {
    auto colon = line.find(':');
    auto issuer = colon == std::string_view::npos ? std::nullopt : digest_from_hex(trim(line.substr(0, colon)));
    std::string serial = colon == std::string_view::npos ? std::string{} : lower(trim(line.substr(colon + 1)));
    if (serial.size() % 2 == 1) serial.insert(serial.begin(), '0');
    auto serial_bytes = from_hex(serial);
    if (!issuer || !serial_bytes || serial_bytes->empty()) {
      throw TrustMaterialError("revocation list line " + std::to_string(no) + " is not issuerhash:serial");
    }
    // Canonical form: no leading zero bytes, "00" for zero.
    auto first = std::find_if(serial_bytes->begin(), serial_bytes->end(), [](auto b) { return b != 0; });
    Bytes trimmed(first, serial_bytes->end());
    out.insert({*issuer, trimmed.empty() ? "00" : to_hex(trimmed)});
  });
  return out;
}

TrustStore TrustStore::load(std::span<const std::filesystem::path> root_pem_files,
                            const std::filesystem::path* pin_file,
                            const std::filesystem::path* revocation_file) {
  std::vector<Bytes> roots;
  for (const auto& path : root_pem_files) {
    auto certs = parse_pem_bundle(read_text_file(path));
    if (certs.empty()) throw TrustMaterialError(path.string() + " contains no certificates");
    roots.insert(roots.end(), certs.begin(), certs.end());
  }
  std::set<Digest256> pins;
  if (pin_file) pins = parse_pin_list(read_text_file(*pin_file));
  std::set<RevokedSerial> revoked;
  if (revocation_file) revoked = parse_revocation_list(read_text_file(*revocation_file));
  return TrustStore(std::move(roots), std::move(pins), std::move(revoked));
}

// --- Chain verification ---------------------------------------------------

const char* to_string(ChainStatus status) {
  switch (status) {
    case ChainStatus::Trusted:
      return "trusted";
    case ChainStatus::Untrusted:
      return "untrusted";
    case ChainStatus::Expired:
      return "expired";
    case ChainStatus::Revoked:
      return "revoked";
    case ChainStatus::PinMismatch:
      return "pin_mismatch";
    case ChainStatus::Malformed:
      break;
  }
  return "malformed";
}

ChainResult verify_chain(std::span<const Bytes> chain, const TrustStore& store, UtcTime now) {
  ChainResult result;
  result.chain_length = chain.size();
  if (chain.empty()) {
    result.problems.push_back("empty certificate chain");
    return result;
  }
  std::vector<X509Ptr> certs;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    auto cert = ossl::parse_der_certificate(chain[i]);
    if (!cert || (X509_get_extension_flags(cert.get()) & EXFLAG_INVALID)) {
      result.problems.push_back("certificate " + std::to_string(i) + " is not valid DER X.509");
      return result;
    }
    certs.push_back(std::move(cert));
  }
  result.leaf_subject = ossl::name_to_string(X509_get_subject_name(certs.front().get()));

  bool untrusted = false, expired = false, revoked = false, pin_mismatch = false, malformed = false;

  for (std::size_t i = 0; i + 1 < certs.size(); ++i) {
    if (!issued_by(certs[i].get(), certs[i + 1].get())) {
      untrusted = true;
      result.problems.push_back("certificate " + std::to_string(i) + " is not signed by its successor");
    } else if (X509_check_ca(certs[i + 1].get()) < 1) {
      untrusted = true;
      result.problems.push_back("certificate " + std::to_string(i + 1) + " is not a CA");
    }
  }

  // Anchor: the last certificate is itself a trusted root, or a root issued it.
  std::vector<X509*> path;
  for (auto& c : certs) path.push_back(c.get());
  X509* top = certs.back().get();
  bool anchored = false;
  const Bytes& top_der = chain.back();
  for (std::size_t i = 0; i < store.roots().size() && !anchored; ++i) {
    if (store.roots()[i] == top_der) anchored = true;
  }
  for (std::size_t i = 0; i < store.parsed().roots.size() && !anchored; ++i) {
    X509* root = store.parsed().roots[i].get();
    if (issued_by(top, root) && X509_check_ca(root) >= 1) {
      anchored = true;
      path.push_back(root);
    }
  }
  if (!anchored) {
    untrusted = true;
    result.problems.push_back("chain does not lead to a root in the local trust store");
  }

  if (!has_signing_usage(certs.front().get())) {
    untrusted = true;
    result.problems.push_back("leaf lacks the document-signing extended key usage");
  }

  const auto t = static_cast<time_t>(now.time_since_epoch().count());
  for (std::size_t i = 0; i < path.size(); ++i) {
    int before = ASN1_TIME_cmp_time_t(X509_get0_notBefore(path[i]), t);
    int after = ASN1_TIME_cmp_time_t(X509_get0_notAfter(path[i]), t);
    if (before == -2 || after == -2) {
      malformed = true;
      result.problems.push_back("certificate " + std::to_string(i) + " has an unreadable validity period");
    } else if (before > 0 || after < 0) {
      expired = true;
      result.problems.push_back("certificate " + std::to_string(i) + " is outside its validity period");
    }
  }

  for (std::size_t i = 0; i < path.size(); ++i) {
    if (store.revoked_serials().contains({issuer_hash_of(path[i]), serial_hex_of(path[i])})) {
      revoked = true;
      result.problems.push_back("certificate " + std::to_string(i) + " is revoked");
    }
  }

  if (!store.pinned_spki_digests().empty() &&
      !store.pinned_spki_digests().contains(spki_digest_of(certs.front().get()))) {
    pin_mismatch = true;
    result.problems.push_back("leaf public key is not pinned");
  }

  if (malformed) {
    result.status = ChainStatus::Malformed;
  } else if (revoked) {
    result.status = ChainStatus::Revoked;
  } else if (expired) {
    result.status = ChainStatus::Expired;
  } else if (pin_mismatch) {
    result.status = ChainStatus::PinMismatch;
  } else if (untrusted) {
    result.status = ChainStatus::Untrusted;
  } else {
    result.status = ChainStatus::Trusted;
  }
  return result;
}

bool verify_claim_signature(const SignatureEnvelope& envelope, ByteView canonical_claim) {
  if (envelope.algorithm == SignatureAlgorithm::Unsupported) {
    throw UnsupportedAlgorithm("unsupported signature algorithm '" + envelope.algorithm_name + "'");
  }
  if (envelope.cert_chain.empty()) return false;
  auto leaf = ossl::parse_der_certificate(envelope.cert_chain.front());
  if (!leaf) return false;
  EVP_PKEY* key = X509_get0_pubkey(leaf.get());
  if (!key) return false;

  Bytes signature;
  if (envelope.algorithm == SignatureAlgorithm::ES256) {
    if (EVP_PKEY_get_base_id(key) != EVP_PKEY_EC || !is_p256(key)) return false;
    if (envelope.signature_bytes.size() != 64) return false;
    signature = raw_ecdsa_to_der(envelope.signature_bytes);
    if (signature.empty()) return false;
  } else {
    if (EVP_PKEY_get_base_id(key) != EVP_PKEY_RSA) return false;
    signature = envelope.signature_bytes;
  }

  ossl::MdCtxPtr ctx(EVP_MD_CTX_new());
  EVP_PKEY_CTX* pctx = nullptr;
  bool ok = ctx && EVP_DigestVerifyInit(ctx.get(), &pctx, EVP_sha256(), nullptr, key) == 1;
  if (ok && envelope.algorithm == SignatureAlgorithm::RS256) {
    ok = EVP_PKEY_CTX_set_rsa_padding(pctx, RSA_PKCS1_PADDING) == 1;
  }
  ok = ok && EVP_DigestVerify(ctx.get(), signature.data(), signature.size(), canonical_claim.data(),
                              canonical_claim.size()) == 1;
  ERR_clear_error();
  return ok;
}

CertificateInfo describe_certificate(ByteView der) {
  auto cert = ossl::parse_der_certificate(der);
  if (!cert) throw TrustMaterialError("undecodable certificate");
  CertificateInfo info;
  info.subject = ossl::name_to_string(X509_get_subject_name(cert.get()));
  info.issuer = ossl::name_to_string(X509_get_issuer_name(cert.get()));
  info.spki_digest = spki_digest_of(cert.get());
  info.issuer_name_hash = issuer_hash_of(cert.get());
  info.serial_hex = serial_hex_of(cert.get());
  info.not_before = asn1_time_string(X509_get0_notBefore(cert.get()));
  info.not_after = asn1_time_string(X509_get0_notAfter(cert.get()));
  return info;
}

std::string der_to_pem(ByteView der) {
  auto cert = ossl::parse_der_certificate(der);
  if (!cert) throw TrustMaterialError("undecodable certificate");
  ossl::BioPtr bio(BIO_new(BIO_s_mem()));
  PEM_write_bio_X509(bio.get(), cert.get());
  char* data = nullptr;
  long len = BIO_get_mem_data(bio.get(), &data);
  return std::string(data, static_cast<std::size_t>(len));
}

}  // namespace originlens
