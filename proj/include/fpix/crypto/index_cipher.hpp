// Hybrid public-key encryption of index vectors: ephemeral ECDH on the
// curve, a SHA-256 counter keystream for confidentiality and HMAC-SHA-256
// over (R || body) for integrity.
//
// Plaintext layout: mode byte || dim (u32 BE) || dim x IEEE-754 binary64 BE.
// Ciphertext layout: encode_point(R) || body || tag (32 bytes).
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fpix/crypto/curve.hpp"
#include "fpix/crypto/random.hpp"
#include "fpix/crypto/sha256.hpp"
#include "fpix/indexing.hpp"

namespace fpix::crypto {

struct KeyPair {
    BigInt d;
    ECPoint q;
};

/// Uniform scalar in [1, n-1] by rejection sampling on bitlen(n)-bit draws.
BigInt random_scalar(const CurveParams& curve, RandomSource& rng);

KeyPair keygen(const CurveParams& curve, RandomSource& rng);
/// Derives Q = d*G; throws KeyError if d is outside [1, n-1].
KeyPair keypair_from_private(const BigInt& d, const CurveParams& curve);

inline constexpr std::size_t kPlaintextHeaderBytes = 5;
inline constexpr std::size_t kTagBytes = 32;

std::vector<std::uint8_t> serialize_index(const IndexVector& v);
IndexVector deserialize_index(std::span<const std::uint8_t> bytes);

/// Exact encoded ciphertext length for an index of `dim` components.
std::size_t ciphertext_size(const CurveParams& curve, std::size_t dim);

struct IndexCiphertext {
    ECPoint r;
    std::vector<std::uint8_t> body;
    Digest tag{};

    std::vector<std::uint8_t> to_bytes(const CurveParams& curve) const;
    /// Splits and checks the layout; R must decode to a non-identity point.
    static IndexCiphertext from_bytes(std::span<const std::uint8_t> bytes, const CurveParams& curve);
};

IndexCiphertext encrypt_index(const IndexVector& v, const ECPoint& public_key,
                              const CurveParams& curve, RandomSource& rng);

/// Verifies the tag before unmasking anything.
IndexVector decrypt_index(const BigInt& private_key, const IndexCiphertext& c, const CurveParams& curve);
IndexVector decrypt_index(const BigInt& private_key, std::span<const std::uint8_t> ciphertext,
                          const CurveParams& curve);

// Key files hold a single line of hex: the private scalar padded to 32 bytes,
// or encode_point(Q) for the public key.
inline constexpr std::size_t kPrivateKeyBytes = 32;

std::string format_private_key(const BigInt& d);
BigInt parse_private_key(std::string_view text, const CurveParams& curve);
std::string format_public_key(const ECPoint& q, const CurveParams& curve);
ECPoint parse_public_key(std::string_view text, const CurveParams& curve);

void write_key_file(const std::string& path, const std::string& contents, bool overwrite);
std::string read_key_file(const std::string& path);

}  // namespace fpix::crypto
