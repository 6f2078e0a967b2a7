#include "fpix/crypto/bigint.hpp"

#include <boost/multiprecision/miller_rabin.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <stdexcept>


namespace fpix::crypto {

namespace {

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::string_view strip_prefix(std::string_view hex) {
    if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) hex.remove_prefix(2);
    return hex;
}

}  // namespace

BigInt from_hex(std::string_view hex) {
    hex = strip_prefix(hex);
    if (hex.empty()) throw std::invalid_argument("empty hex number");
    BigInt v = 0;
    for (char c : hex) {
        const int d = hex_digit(c);
        if (d < 0) throw std::invalid_argument("invalid hex digit '" + std::string(1, c) + "'");
        v = (v << 4) | d;
    }
    return v;
}

std::string to_hex(const BigInt& v) {
    if (v == 0) return "0";
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    BigInt t = v;
    while (t > 0) {
        out.push_back(digits[static_cast<unsigned>(t & 0xf)]);
        t >>= 4;
    }
    return {out.rbegin(), out.rend()};
}

std::size_t bit_length(const BigInt& v) {
    if (v <= 0) return 0;
    return boost::multiprecision::msb(v) + 1;
}

std::size_t byte_length(const BigInt& v) { return (bit_length(v) + 7) / 8; }

std::vector<std::uint8_t> to_bytes_be(const BigInt& v, std::size_t width) {
    if (v < 0 || byte_length(v) > width) {
        throw std::invalid_argument("integer does not fit in " + std::to_string(width) + " bytes");
    }
    std::vector<std::uint8_t> out(width, 0);
    BigInt t = v;
    for (std::size_t i = 0; i < width && t > 0; ++i) {
        out[width - 1 - i] = static_cast<std::uint8_t>(t & 0xff);
        t >>= 8;
    }
    return out;
}

BigInt from_bytes_be(std::span<const std::uint8_t> bytes) {
    BigInt v = 0;
    for (std::uint8_t b : bytes) v = (v << 8) | b;
    return v;
}

BigInt mod(const BigInt& a, const BigInt& m) {
    BigInt r = a % m;
    if (r < 0) r += m;
    return r;
}

BigInt mod_inverse(const BigInt& a, const BigInt& m) {
    BigInt old_r = mod(a, m), r = m;
    BigInt old_s = 1, s = 0;
    while (r != 0) {
        const BigInt q = old_r / r;
        BigInt tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        tmp = old_s - q * s;
        old_s = s;
        s = tmp;
    }
    if (old_r != 1) throw std::domain_error("mod_inverse: value not invertible");
    return mod(old_s, m);
}

bool is_probable_prime(const BigInt& v) {
    if (v < 2) return false;
    // Fixed seed: the witnesses only need to be arbitrary, not secret.
    boost::random::mt19937 gen(0x5eed);
    return boost::multiprecision::miller_rabin_test(v, 40, gen);
}

std::string hex_encode(std::span<const std::uint8_t> bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

std::vector<std::uint8_t> hex_decode(std::string_view hex) {
    if (hex.size() % 2 != 0) throw std::invalid_argument("hex string has odd length");
    std::vector<std::uint8_t> out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const int hi = hex_digit(hex[2 * i]);
        const int lo = hex_digit(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex digit");
        out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return out;
}

}  // namespace fpix::crypto
