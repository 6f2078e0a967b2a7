#include <doctest.h>

#include <openssl/hmac.h>
#include <openssl/sha.h>

#include <filesystem>
#include <fstream>
#include <sys/stat.h>
#include <unistd.h>

#include "fpix/crypto/bigint.hpp"
#include "fpix/crypto/curve.hpp"
#include "fpix/crypto/errors.hpp"
#include "fpix/crypto/index_cipher.hpp"
#include "fpix/crypto/random.hpp"
#include "fpix/crypto/sha256.hpp"
#include "oracles.hpp"

using namespace fpix;
using namespace fpix::crypto;
namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> bytes_of(std::string_view s) { return {s.begin(), s.end()}; }

std::string hex(const Digest& d) { return hex_encode(d); }

ECPoint toy_point(const oracle::ToyCurve::Pt& p) {
    if (!p) return ECPoint{};
    return ECPoint(p->first, p->second);
}

IndexVector random_index(oracle::Lcg& rng, IndexMode mode) {
    IndexVector v{mode, {}};
    const std::size_t dim = mode == IndexMode::Hist ? 256 : 1 + rng.below(64);
    for (std::size_t i = 0; i < dim; ++i) v.components.push_back(rng.uniform() * 1e3);
    return v;
}

fs::path scratch_dir(const char* tag) {
    const fs::path dir = fs::temp_directory_path() / ("fpix-crypto-" + std::string(tag) + "-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

// ---------------------------------------------------------------- hashing

TEST_CASE("sha256 standard vectors") {
    CHECK(hex(sha256(bytes_of("abc"))) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(hex(sha256({})) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(hex(sha256(bytes_of("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq"))) ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
    const std::vector<std::uint8_t> million(1'000'000, 'a');
    CHECK(hex(sha256(million)) == "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("sha256 streaming equals one-shot across every split") {
    const auto msg = bytes_of(std::string(200, 'x') + "tail");
    const Digest whole = sha256(msg);
    for (std::size_t cut = 0; cut <= msg.size(); cut += 7) {
        Sha256 h;
        h.update(std::span(msg).first(cut));
        h.update(std::span(msg).subspan(cut));
        CHECK(h.finish() == whole);
    }
}

TEST_CASE("hmac_sha256 RFC 4231 vectors") {
    {
        const std::vector<std::uint8_t> key(20, 0x0b);
        CHECK(hex(hmac_sha256(key, bytes_of("Hi There"))) ==
              "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7");
    }
    CHECK(hex(hmac_sha256(bytes_of("Jefe"), bytes_of("what do ya want for nothing?"))) ==
          "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
    {
        // Key longer than the block size is hashed first.
        const std::vector<std::uint8_t> key(131, 0xaa);
        CHECK(hex(hmac_sha256(key, bytes_of("Test Using Larger Than Block-Size Key - Hash Key First"))) ==
              "60e431591ee0b67f0d8a26aacbf5b77f8e0bc6213728c5140546040f0ee37f54");
    }
}

TEST_CASE("sha256 and hmac agree with OpenSSL on random inputs") {
    oracle::Lcg rng(11);
    for (int i = 0; i < 300; ++i) {
        std::vector<std::uint8_t> msg(rng.below(300)), key(rng.below(150));
        for (auto& b : msg) b = static_cast<std::uint8_t>(rng.next() >> 56);
        for (auto& b : key) b = static_cast<std::uint8_t>(rng.next() >> 56);

        Digest ref{};
        SHA256(msg.data(), msg.size(), ref.data());
        CHECK(sha256(msg) == ref);

        unsigned len = 0;
        Digest mac{};
        HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), msg.data(), msg.size(), mac.data(), &len);
        REQUIRE(len == 32);
        CHECK(hmac_sha256(key, msg) == mac);
    }
}

TEST_CASE("constant_time_equal") {
    const auto a = bytes_of("abcdef");
    CHECK(constant_time_equal(a, bytes_of("abcdef")));
    CHECK_FALSE(constant_time_equal(a, bytes_of("abcdeg")));
    CHECK_FALSE(constant_time_equal(a, bytes_of("abcde")));
}

// ---------------------------------------------------------------- big integers

TEST_CASE("hex and byte conversions") {
    CHECK(from_hex("0xff") == 255);
    CHECK(from_hex("DEADbeef") == BigInt(0xdeadbeefu));
    CHECK(to_hex(BigInt(0)) == "0");
    CHECK(to_bytes_be(BigInt(0x0102), 4) == std::vector<std::uint8_t>{0, 0, 1, 2});
    CHECK_THROWS(to_bytes_be(BigInt(0x10000), 2));
    CHECK(from_bytes_be(std::vector<std::uint8_t>{0, 0, 1, 2}) == 0x0102);
    CHECK(bit_length(BigInt(19)) == 5);
    CHECK(byte_length(BigInt(256)) == 2);
    CHECK(hex_decode("00ff10") == std::vector<std::uint8_t>{0, 0xff, 0x10});
    CHECK_THROWS(hex_decode("abc"));
    CHECK_THROWS(hex_decode("zz"));
}

TEST_CASE("mod_inverse against brute force") {
    for (int m : {17, 19, 97}) {
        for (int a = 1; a < m; ++a) {
            const BigInt inv = mod_inverse(a, m);
            CHECK(mod(inv * a, m) == 1);
            CHECK(inv >= 0);
            CHECK(inv < m);
        }
    }
    CHECK(mod_inverse(-3, 17) == mod_inverse(14, 17));
    CHECK_THROWS_AS(mod_inverse(6, 9), std::domain_error);
    CHECK_THROWS_AS(mod_inverse(0, 17), std::domain_error);
    CHECK(mod(BigInt(-1), 17) == 16);
}

TEST_CASE("is_probable_prime") {
    CHECK(is_probable_prime(17));
    CHECK(is_probable_prime(19));
    CHECK_FALSE(is_probable_prime(1));
    CHECK_FALSE(is_probable_prime(561));  // Carmichael
    CHECK(is_probable_prime(secp192r1().p));
    CHECK_FALSE(is_probable_prime(secp192r1().p + 2));
}

// ---------------------------------------------------------------- curves

TEST_CASE("toy curve matches the exhaustive oracle") {
    const CurveParams& c = toy_curve();
    const auto pts = oracle::ToyCurve::points();
    REQUIRE(pts.size() == 19);

    std::size_t on_curve = 0;
    for (int x = 0; x < 17; ++x)
        for (int y = 0; y < 17; ++y)
            if (is_on_curve(ECPoint(x, y), c)) ++on_curve;
    CHECK(on_curve == 18);

    for (const auto& a : pts)
        for (const auto& b : pts) CHECK(point_add(toy_point(a), toy_point(b), c) == toy_point(oracle::ToyCurve::add(a, b)));

    const oracle::ToyCurve::Pt g = std::make_pair(5, 1);
    for (int k = 0; k <= 40; ++k) CHECK(scalar_mul(k, c.g, c) == toy_point(oracle::ToyCurve::repeated(k, g)));
}

TEST_CASE("toy curve frozen multiples of G") {
    const CurveParams& c = toy_curve();
    const std::vector<std::pair<int, int>> expected{{5, 1},  {6, 3},   {10, 6}, {3, 1},  {9, 16}, {16, 13},
                                                    {0, 6},  {13, 7},  {7, 6},  {7, 11}, {13, 10}, {0, 11},
                                                    {16, 4}, {9, 1},   {3, 16}, {10, 11}, {6, 14}, {5, 16}};
    CHECK(scalar_mul(0, c.g, c).is_identity());
    for (int k = 1; k <= 18; ++k) CHECK(scalar_mul(k, c.g, c) == ECPoint(expected[k - 1].first, expected[k - 1].second));
    CHECK(scalar_mul(19, c.g, c).is_identity());
    CHECK(point_double(c.g, c) == ECPoint(6, 3));
}

TEST_CASE("group axioms on the toy curve") {
    const CurveParams& c = toy_curve();
    std::vector<ECPoint> pts;
    for (const auto& p : oracle::ToyCurve::points()) pts.push_back(toy_point(p));
    for (const auto& a : pts) {
        CHECK(point_add(a, ECPoint{}, c) == a);
        CHECK(point_add(a, point_negate(a, c), c).is_identity());
        CHECK(point_double(a, c) == point_add(a, a, c));
        for (const auto& b : pts) {
            CHECK(point_add(a, b, c) == point_add(b, a, c));
            for (const auto& d : pts) CHECK(point_add(point_add(a, b, c), d, c) == point_add(a, point_add(b, d, c), c));
        }
    }
}

TEST_CASE("scalar multiplication is a homomorphism on secp192r1") {
    const CurveParams& c = secp192r1();
    SeededRandom rng(5);
    for (int i = 0; i < 5; ++i) {
        const BigInt a = random_scalar(c, rng), b = random_scalar(c, rng);
        CHECK(point_add(scalar_mul(a, c.g, c), scalar_mul(b, c.g, c), c) == scalar_mul(mod(a + b, c.n), c.g, c));
        CHECK(scalar_mul(a, scalar_mul(b, c.g, c), c) == scalar_mul(mod(a * b, c.n), c.g, c));
    }
    CHECK(scalar_mul(c.n - 1, c.g, c) == point_negate(c.g, c));
}

TEST_CASE("group law rejects off-curve operands and negative scalars") {
    const CurveParams& c = toy_curve();
    const ECPoint bad(5, 2);
    CHECK_THROWS_AS(point_add(bad, c.g, c), PointError);
    CHECK_THROWS_AS(point_double(bad, c), PointError);
    CHECK_THROWS_AS(scalar_mul(3, bad, c), PointError);
    CHECK_THROWS_AS(scalar_mul(-1, c.g, c), std::invalid_argument);
}

TEST_CASE("encode_point and decode_point") {
    const CurveParams& c = toy_curve();
    CHECK(encode_point(ECPoint(5, 1), c) == std::vector<std::uint8_t>{0x04, 0x05, 0x01});
    CHECK(encode_point(ECPoint{}, c) == std::vector<std::uint8_t>{0x00});
    CHECK(decode_point(std::vector<std::uint8_t>{0x00}, c).is_identity());
    for (const auto& p : oracle::ToyCurve::points()) {
        const ECPoint pt = toy_point(p);
        CHECK(decode_point(encode_point(pt, c), c) == pt);
    }
    CHECK_THROWS_AS(decode_point(std::vector<std::uint8_t>{0x04, 0x05, 0x02}, c), PointError);
    CHECK_THROWS_AS(decode_point(std::vector<std::uint8_t>{0x02, 0x05, 0x01}, c), PointError);
    CHECK_THROWS_AS(decode_point(std::vector<std::uint8_t>{0x04, 0x05}, c), PointError);
    CHECK_THROWS_AS(decode_point({}, c), PointError);

    const CurveParams& p192 = secp192r1();
    const auto enc = encode_point(p192.g, p192);
    CHECK(enc.size() == 49);
    CHECK(decode_point(enc, p192) == p192.g);
}

TEST_CASE("secp192r1 constants validate") {
    const CurveParams& c = secp192r1();
    CHECK_NOTHROW(validate_curve(c));
    CHECK(c.p == from_hex("fffffffffffffffffffffffffffffffeffffffffffffffff"));
    CHECK(c.n == from_hex("ffffffffffffffffffffffff99def836146bc9b1b4d22831"));
    CHECK(c.coord_bytes() == 24);
    CHECK(is_on_curve(c.g, c));
    CHECK(scalar_mul(c.n, c.g, c).is_identity());
    CHECK_NOTHROW(validate_curve(toy_curve()));
    CHECK(&builtin_curve("toy") == &toy_curve());
    CHECK(&builtin_curve("P-192") == &secp192r1());
    CHECK_THROWS_AS(builtin_curve("secp256k1"), CurveParamError);
}

TEST_CASE("curve parameter files") {
    const CurveParams& c = secp192r1();
    const CurveParams back = parse_curve_params(format_curve_params(c));
    CHECK(back.p == c.p);
    CHECK(back.a == c.a);
    CHECK(back.b == c.b);
    CHECK(back.g == c.g);
    CHECK(back.n == c.n);
    CHECK(back.h == c.h);

    const std::string toy = "# toy\nname = toy\np = 11\na = 2\nb = 2\ngx = 5\ngy = 1\nn = 13\nh = 1\n";
    const CurveParams t = parse_curve_params(toy);
    CHECK(t.p == 17);
    CHECK(t.n == 19);

    CHECK_THROWS_AS(parse_curve_params("p = 11\np = 11\n"), CurveParamError);
    CHECK_THROWS_AS(parse_curve_params("p 11\n"), CurveParamError);
    // Singular: 4a^3 + 27b^2 = 0 mod p with a = b = 0.
    CHECK_THROWS_AS(parse_curve_params("p = 11\na = 0\nb = 0\ngx = 0\ngy = 0\nn = 13\nh = 1\n"), CurveParamError);
    // G moved off the curve.
    CHECK_THROWS_AS(parse_curve_params("p = 11\na = 2\nb = 2\ngx = 5\ngy = 2\nn = 13\nh = 1\n"), CurveParamError);
    // Composite p.
    CHECK_THROWS_AS(parse_curve_params("p = 15\na = 2\nb = 2\ngx = 5\ngy = 1\nn = 13\nh = 1\n"), CurveParamError);
    // Wrong order.
    CHECK_THROWS_AS(parse_curve_params("p = 11\na = 2\nb = 2\ngx = 5\ngy = 1\nn = 11\nh = 1\n"), CurveParamError);
    CHECK_THROWS_AS(load_curve_file("/nonexistent/curve.params"), CurveParamError);
}

TEST_CASE("shipped secp192r1 parameter file matches the builtin") {
    const CurveParams f = load_curve_file(FPIX_DATA_DIR "/secp192r1.params");
    const CurveParams& c = secp192r1();
    CHECK(f.p == c.p);
    CHECK(f.a == c.a);
    CHECK(f.b == c.b);
    CHECK(f.g == c.g);
    CHECK(f.n == c.n);
    CHECK(f.h == c.h);
}

// ---------------------------------------------------------------- keys and RNG

TEST_CASE("random_scalar rejection sampling") {
    const CurveParams& c = toy_curve();
    // 0xff masks to 31 >= n, 0 and 19 are out of range, then 2 is accepted.
    ReplayRandom rng({0xff, 0x00, 0x13, 0x02});
    const KeyPair kp = keygen(c, rng);
    CHECK(kp.d == 2);
    CHECK(kp.q == ECPoint(6, 3));
    CHECK(rng.remaining() == 0);
    CHECK_THROWS_AS(keygen(c, rng), RngError);

    SeededRandom seeded(1);
    for (int i = 0; i < 500; ++i) {
        const BigInt k = random_scalar(c, seeded);
        CHECK(k >= 1);
        CHECK(k < c.n);
    }
}

TEST_CASE("seeded random is reproducible and chunking-independent") {
    SeededRandom a(99), b(99), other(100);
    std::vector<std::uint8_t> x(100), y(100), z(100);
    a.fill(x);
    b.fill(std::span(y).first(33));
    b.fill(std::span(y).subspan(33));
    other.fill(z);
    CHECK(x == y);
    CHECK(x != z);

    SystemRandom sys;
    std::vector<std::uint8_t> s1(32), s2(32);
    sys.fill(s1);
    sys.fill(s2);
    CHECK(s1 != s2);
}

TEST_CASE("keypair_from_private range") {
    const CurveParams& c = toy_curve();
    CHECK(keypair_from_private(7, c).q == ECPoint(0, 6));
    CHECK_THROWS_AS(keypair_from_private(0, c), KeyError);
    CHECK_THROWS_AS(keypair_from_private(19, c), KeyError);
}

// ---------------------------------------------------------------- encryption

TEST_CASE("plaintext serialization") {
    const IndexVector v{IndexMode::Svd, {1.5, -2.25}};
    const auto bytes = serialize_index(v);
    CHECK(hex_encode(bytes) == "0100000002" "3ff8000000000000" "c002000000000000");
    CHECK(deserialize_index(bytes) == v);
    auto bad_mode = bytes;
    bad_mode[0] = 0x09;
    CHECK_THROWS_AS(deserialize_index(bad_mode), MalformedCiphertext);
    CHECK_THROWS_AS(deserialize_index(std::span(bytes).first(bytes.size() - 1)), MalformedCiphertext);
    CHECK_THROWS_AS(deserialize_index(std::span(bytes).first(3)), MalformedCiphertext);
}

TEST_CASE("frozen toy ciphertext") {
    // d = 7 gives Q = (0, 6); ephemeral e = 3 gives R = (10, 6) and S = eQ = (6, 3).
    const CurveParams& c = toy_curve();
    ReplayRandom key_rng({0x07});
    const KeyPair kp = keygen(c, key_rng);
    CHECK(format_public_key(kp.q, c) == "040006");

    ReplayRandom eph({0x03});
    const IndexVector v{IndexMode::Svd, {1.5, -2.25}};
    const IndexCiphertext ct = encrypt_index(v, kp.q, c, eph);
    CHECK(ct.r == ECPoint(10, 6));
    CHECK(scalar_mul(3, kp.q, c) == ECPoint(6, 3));
    const auto bytes = ct.to_bytes(c);
    CHECK(hex_encode(bytes) ==
          "040a06b5548222497c623d548c653789e9b5dcc16a42288561efb4e782e0a00b1554601c757234c555c87d05831b13ca620125b1b69f75fd");
    CHECK(bytes.size() == ciphertext_size(c, 2));
    CHECK(decrypt_index(kp.d, bytes, c) == v);
}

TEST_CASE("frozen ciphertext recomputed from first principles") {
    // Keystream and tag rebuilt with OpenSSL primitives.
    const CurveParams& c = toy_curve();
    const std::vector<std::uint8_t> sx{0x06};
    const IndexVector v{IndexMode::Svd, {1.5, -2.25}};
    const auto pt = serialize_index(v);

    std::vector<std::uint8_t> ks;
    for (std::uint32_t i = 0; ks.size() < pt.size(); ++i) {
        std::vector<std::uint8_t> in = sx;
        for (int s = 24; s >= 0; s -= 8) in.push_back(static_cast<std::uint8_t>(i >> s));
        Digest d{};
        SHA256(in.data(), in.size(), d.data());
        ks.insert(ks.end(), d.begin(), d.end());
    }
    std::vector<std::uint8_t> expected{0x04, 0x0a, 0x06};
    for (std::size_t i = 0; i < pt.size(); ++i) expected.push_back(pt[i] ^ ks[i]);

    std::vector<std::uint8_t> mk_in = sx;
    for (char ch : std::string("mac")) mk_in.push_back(static_cast<std::uint8_t>(ch));
    Digest mac_key{};
    SHA256(mk_in.data(), mk_in.size(), mac_key.data());
    Digest tag{};
    unsigned len = 0;
    HMAC(EVP_sha256(), mac_key.data(), 32, expected.data(), expected.size(), tag.data(), &len);
    expected.insert(expected.end(), tag.begin(), tag.end());

    ReplayRandom eph({0x03});
    CHECK(encrypt_index(v, ECPoint(0, 6), c, eph).to_bytes(c) == expected);
}

TEST_CASE("encrypt/decrypt roundtrip property on both curves") {
    oracle::Lcg rng(123);
    SeededRandom crypto_rng(7);
    for (const CurveParams* c : {&toy_curve(), &secp192r1()}) {
        const KeyPair kp = keygen(*c, crypto_rng);
        const int trials = c == &toy_curve() ? 300 : 30;
        for (int i = 0; i < trials; ++i) {
            const IndexMode mode = static_cast<IndexMode>(1 + i % 3);
            const IndexVector v = random_index(rng, mode);
            const IndexCiphertext ct = encrypt_index(v, kp.q, *c, crypto_rng);
            const auto bytes = ct.to_bytes(*c);
            CHECK(bytes.size() == ciphertext_size(*c, v.dim()));
            CHECK(bytes.size() == c->point_bytes() + 5 + 8 * v.dim() + 32);
            CHECK(decrypt_index(kp.d, bytes, *c) == v);
        }
    }
}

TEST_CASE("same plaintext encrypts differently with fresh randomness") {
    const CurveParams& c = secp192r1();
    SeededRandom rng(3);
    const KeyPair kp = keygen(c, rng);
    const IndexVector v{IndexMode::Pca, {3, 2, 1}};
    CHECK(encrypt_index(v, kp.q, c, rng).to_bytes(c) != encrypt_index(v, kp.q, c, rng).to_bytes(c));
}

TEST_CASE("every single-bit flip is rejected") {
    const CurveParams& c = toy_curve();
    SeededRandom rng(4);
    const KeyPair kp = keygen(c, rng);
    const auto bytes = encrypt_index(IndexVector{IndexMode::Svd, {4, 3, 1}}, kp.q, c, rng).to_bytes(c);
    for (std::size_t bit = 0; bit < bytes.size() * 8; ++bit) {
        auto bad = bytes;
        bad[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
        bool rejected = false;
        try {
            (void)decrypt_index(kp.d, bad, c);
        } catch (const CryptoError&) {
            rejected = true;
        }
        CHECK_MESSAGE(rejected, "bit " << bit);
    }
}

TEST_CASE("wrong key and malformed inputs") {
    const CurveParams& c = secp192r1();
    SeededRandom rng(8);
    const KeyPair alice = keygen(c, rng), bob = keygen(c, rng);
    const auto bytes = encrypt_index(IndexVector{IndexMode::Hist, std::vector<double>(256, 1.0 / 256)}, alice.q, c, rng)
                           .to_bytes(c);
    CHECK_THROWS_AS(decrypt_index(bob.d, bytes, c), IntegrityError);
    CHECK_THROWS_AS(decrypt_index(0, bytes, c), KeyError);
    CHECK_THROWS_AS(decrypt_index(alice.d, std::span(bytes).first(40), c), MalformedCiphertext);
    CHECK_THROWS_AS(decrypt_index(alice.d, std::span(bytes).first(bytes.size() - 1), c), MalformedCiphertext);

    auto off = bytes;
    off[1] ^= 0x01;  // R.x no longer on the curve (overwhelmingly likely)
    CHECK_THROWS_AS(decrypt_index(alice.d, off, c), PointError);

    const auto toy_ct = [] {
        ReplayRandom e({0x03});
        return encrypt_index(IndexVector{IndexMode::Svd, {1.0}}, ECPoint(0, 6), toy_curve(), e).to_bytes(toy_curve());
    }();
    auto identity_r = std::vector<std::uint8_t>{0x00};
    identity_r.insert(identity_r.end(), toy_ct.begin() + 3, toy_ct.end());
    CHECK_THROWS_AS(decrypt_index(7, identity_r, toy_curve()), CryptoError);

    CHECK_THROWS_AS(encrypt_index(IndexVector{IndexMode::Svd, {1.0}}, ECPoint(5, 2), toy_curve(), rng), PointError);
}

TEST_CASE("key file formats") {
    const CurveParams& c = secp192r1();
    SeededRandom rng(21);
    const KeyPair kp = keygen(c, rng);
    const std::string sec = format_private_key(kp.d);
    CHECK(sec.size() == 64);
    CHECK(parse_private_key(sec, c) == kp.d);
    CHECK(parse_public_key(format_public_key(kp.q, c), c) == kp.q);
    CHECK(format_private_key(BigInt(7)).starts_with(std::string(62, '0') + "07"));
    CHECK_THROWS_AS(parse_private_key("07", c), KeyError);
    CHECK_THROWS_AS(parse_private_key(std::string(64, '0'), c), KeyError);
    CHECK_THROWS_AS(parse_public_key("040502", toy_curve()), PointError);
    CHECK_THROWS_AS(parse_public_key("00", toy_curve()), KeyError);

    const fs::path dir = scratch_dir("keys");
    const std::string path = (dir / "k.sec").string();
    write_key_file(path, sec, false);
    CHECK(parse_private_key(read_key_file(path), c) == kp.d);
    CHECK_THROWS_AS(write_key_file(path, sec, false), KeyError);
    CHECK_NOTHROW(write_key_file(path, sec, true));
    CHECK_THROWS_AS(read_key_file((dir / "missing").string()), KeyError);
    fs::remove_all(dir);
}
