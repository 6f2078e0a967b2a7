#include "fpix/crypto/index_cipher.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fpix/crypto/errors.hpp"

namespace fpix::crypto {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) << 24 | static_cast<std::uint32_t>(p[1]) << 16 |
           static_cast<std::uint32_t>(p[2]) << 8 | p[3];
}

// Shared-secret x coordinate, padded to the field width.
std::vector<std::uint8_t> shared_x(const ECPoint& s, const CurveParams& curve) {
    return to_bytes_be(s.x(), curve.coord_bytes());
}

void apply_keystream(std::span<std::uint8_t> data, std::span<const std::uint8_t> secret) {
    std::uint32_t block = 0;
    for (std::size_t off = 0; off < data.size(); off += 32, ++block) {
        const std::uint8_t counter[4] = {static_cast<std::uint8_t>(block >> 24),
                                         static_cast<std::uint8_t>(block >> 16),
                                         static_cast<std::uint8_t>(block >> 8),
                                         static_cast<std::uint8_t>(block)};
        const Digest ks = Sha256().update(secret).update(counter).finish();
        const std::size_t n = std::min<std::size_t>(32, data.size() - off);
        for (std::size_t i = 0; i < n; ++i) data[off + i] ^= ks[i];
    }
}

Digest mac_key(std::span<const std::uint8_t> secret) {
    return Sha256().update(secret).update(std::string_view("mac")).finish();
}

Digest compute_tag(const Digest& key, std::span<const std::uint8_t> encoded_r,
                   std::span<const std::uint8_t> body) {
    std::vector<std::uint8_t> msg(encoded_r.begin(), encoded_r.end());
    msg.insert(msg.end(), body.begin(), body.end());
    return hmac_sha256(key, msg);
}

std::string strip_whitespace(std::string_view text) {
    std::string out;
    for (char c : text)
        if (c != ' ' && c != '\n' && c != '\r' && c != '\t') out.push_back(c);
    return out;
}

}  // namespace

BigInt random_scalar(const CurveParams& curve, RandomSource& rng) {
    const std::size_t bits = bit_length(curve.n);
    const std::size_t nbytes = (bits + 7) / 8;
    const unsigned top_bits = static_cast<unsigned>(bits - 8 * (nbytes - 1));
    const std::uint8_t top_mask = static_cast<std::uint8_t>((1u << top_bits) - 1);
    std::vector<std::uint8_t> buf(nbytes);
    for (;;) {
        rng.fill(buf);
        buf[0] &= top_mask;
        BigInt k = from_bytes_be(buf);
        if (k >= 1 && k < curve.n) return k;
    }
}

KeyPair keygen(const CurveParams& curve, RandomSource& rng) {
    const BigInt d = random_scalar(curve, rng);
    return KeyPair{d, scalar_mul(d, curve.g, curve)};
}

KeyPair keypair_from_private(const BigInt& d, const CurveParams& curve) {
    if (d < 1 || d >= curve.n) throw KeyError("private scalar outside [1, n-1]");
    return KeyPair{d, scalar_mul(d, curve.g, curve)};
}

std::vector<std::uint8_t> serialize_index(const IndexVector& v) {
    if (v.components.size() > 0xffffffffu) throw std::length_error("index vector too long");
    std::vector<std::uint8_t> out;
    out.reserve(kPlaintextHeaderBytes + 8 * v.dim());
    out.push_back(static_cast<std::uint8_t>(v.mode));
    put_u32(out, static_cast<std::uint32_t>(v.dim()));
    for (double c : v.components) {
        const auto bits = std::bit_cast<std::uint64_t>(c);
        for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(bits >> s));
    }
    return out;
}

IndexVector deserialize_index(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kPlaintextHeaderBytes) throw MalformedCiphertext("index plaintext: truncated header");
    if (!is_valid_mode_byte(bytes[0])) {
        throw MalformedCiphertext("index plaintext: unknown mode byte " + std::to_string(bytes[0]));
    }
    const std::uint32_t dim = get_u32(bytes.data() + 1);
    if (dim == 0 || bytes.size() != kPlaintextHeaderBytes + 8 * static_cast<std::size_t>(dim)) {
        throw MalformedCiphertext("index plaintext: dimension " + std::to_string(dim) +
                                  " does not match payload of " + std::to_string(bytes.size()) + " bytes");
    }
    IndexVector v{static_cast<IndexMode>(bytes[0]), std::vector<double>(dim)};
    for (std::size_t i = 0; i < dim; ++i) {
        std::uint64_t bits = 0;
        for (int k = 0; k < 8; ++k) bits = bits << 8 | bytes[kPlaintextHeaderBytes + 8 * i + k];
        v.components[i] = std::bit_cast<double>(bits);
    }
    return v;
}

std::size_t ciphertext_size(const CurveParams& curve, std::size_t dim) {
    return curve.point_bytes() + kPlaintextHeaderBytes + 8 * dim + kTagBytes;
}

std::vector<std::uint8_t> IndexCiphertext::to_bytes(const CurveParams& curve) const {
    std::vector<std::uint8_t> out = encode_point(r, curve);
    out.insert(out.end(), body.begin(), body.end());
    out.insert(out.end(), tag.begin(), tag.end());
    return out;
}

IndexCiphertext IndexCiphertext::from_bytes(std::span<const std::uint8_t> bytes, const CurveParams& curve) {
    const std::size_t point_len = curve.point_bytes();
    const std::size_t min_len = point_len + kPlaintextHeaderBytes + kTagBytes;
    if (bytes.size() < min_len) {
        throw MalformedCiphertext("ciphertext truncated: " + std::to_string(bytes.size()) +
                                  " bytes, need at least " + std::to_string(min_len));
    }
    if ((bytes.size() - min_len) % 8 != 0) {
        throw MalformedCiphertext("ciphertext length " + std::to_string(bytes.size()) +
                                  " is not a whole number of components");
    }
    IndexCiphertext c;
    c.r = decode_point(bytes.first(point_len), curve);
    if (c.r.is_identity()) throw MalformedCiphertext("ciphertext ephemeral point is the identity");
    const auto body = bytes.subspan(point_len, bytes.size() - point_len - kTagBytes);
    c.body.assign(body.begin(), body.end());
    std::memcpy(c.tag.data(), bytes.data() + bytes.size() - kTagBytes, kTagBytes);
    return c;
}

IndexCiphertext encrypt_index(const IndexVector& v, const ECPoint& public_key, const CurveParams& curve,
                              RandomSource& rng) {
    if (!is_on_curve(public_key, curve)) throw PointError("encrypt_index: public key not on curve " + curve.name);
    if (public_key.is_identity()) throw PointError("encrypt_index: public key is the identity");

    IndexCiphertext c;
    ECPoint shared;
    do {
        const BigInt e = random_scalar(curve, rng);
        c.r = scalar_mul(e, curve.g, curve);
        shared = scalar_mul(e, public_key, curve);
    } while (shared.is_identity());

    const auto secret = shared_x(shared, curve);
    c.body = serialize_index(v);
    apply_keystream(c.body, secret);
    c.tag = compute_tag(mac_key(secret), encode_point(c.r, curve), c.body);
    return c;
}

IndexVector decrypt_index(const BigInt& private_key, const IndexCiphertext& c, const CurveParams& curve) {
    if (private_key < 1 || private_key >= curve.n) throw KeyError("private scalar outside [1, n-1]");
    if (c.r.is_identity() || !is_on_curve(c.r, curve)) {
        throw PointError("decrypt_index: ephemeral point not on curve " + curve.name);
    }
    const ECPoint shared = scalar_mul(private_key, c.r, curve);
    if (shared.is_identity()) throw IntegrityError("index ciphertext failed integrity check");
    const auto secret = shared_x(shared, curve);
    const Digest expected = compute_tag(mac_key(secret), encode_point(c.r, curve), c.body);
    if (!constant_time_equal(expected, c.tag)) throw IntegrityError("index ciphertext failed integrity check");

    std::vector<std::uint8_t> plain = c.body;
    apply_keystream(plain, secret);
    return deserialize_index(plain);
}

IndexVector decrypt_index(const BigInt& private_key, std::span<const std::uint8_t> ciphertext,
                          const CurveParams& curve) {
    return decrypt_index(private_key, IndexCiphertext::from_bytes(ciphertext, curve), curve);
}

std::string format_private_key(const BigInt& d) { return hex_encode(to_bytes_be(d, kPrivateKeyBytes)); }

BigInt parse_private_key(std::string_view text, const CurveParams& curve) {
    const std::string hex = strip_whitespace(text);
    if (hex.size() != 2 * kPrivateKeyBytes) {
        throw KeyError("private key must be " + std::to_string(2 * kPrivateKeyBytes) + " hex digits");
    }
    BigInt d;
    try {
        d = from_bytes_be(hex_decode(hex));
    } catch (const std::invalid_argument& e) {
        throw KeyError(std::string("private key: ") + e.what());
    }
    if (d < 1 || d >= curve.n) throw KeyError("private key outside [1, n-1] for curve " + curve.name);
    return d;
}

std::string format_public_key(const ECPoint& q, const CurveParams& curve) {
    return hex_encode(encode_point(q, curve));
}

ECPoint parse_public_key(std::string_view text, const CurveParams& curve) {
    std::vector<std::uint8_t> bytes;
    try {
        bytes = hex_decode(strip_whitespace(text));
    } catch (const std::invalid_argument& e) {
        throw KeyError(std::string("public key: ") + e.what());
    }
    ECPoint q = decode_point(bytes, curve);
    if (q.is_identity()) throw KeyError("public key is the identity");
    return q;
}

void write_key_file(const std::string& path, const std::string& contents, bool overwrite) {
    if (!overwrite && std::filesystem::exists(path)) {
        throw KeyError("key file '" + path + "' already exists");
    }
    std::ofstream out(path, std::ios::trunc);
    out << contents << '\n';
    if (!out) throw KeyError("cannot write key file '" + path + "'");
}

std::string read_key_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw KeyError("cannot read key file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace fpix::crypto
