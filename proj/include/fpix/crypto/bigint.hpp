// Arbitrary-precision integers for field and scalar arithmetic. Storage and
// the basic operators come from Boost.Multiprecision; modular inversion is
// the extended Euclidean algorithm below.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace fpix::crypto {

using BigInt = boost::multiprecision::cpp_int;

/// Parses hexadecimal digits, with or without a leading "0x".
BigInt from_hex(std::string_view hex);
/// Lowercase hex without prefix; "0" for zero.
std::string to_hex(const BigInt& v);

std::size_t bit_length(const BigInt& v);
std::size_t byte_length(const BigInt& v);

/// Big-endian bytes left-padded to `width`; throws if `v` does not fit.
std::vector<std::uint8_t> to_bytes_be(const BigInt& v, std::size_t width);
BigInt from_bytes_be(std::span<const std::uint8_t> bytes);

/// Least non-negative residue.
BigInt mod(const BigInt& a, const BigInt& m);

/// a^-1 mod m via extended Euclid; throws std::domain_error when gcd(a, m) != 1.
BigInt mod_inverse(const BigInt& a, const BigInt& m);

bool is_probable_prime(const BigInt& v);

std::string hex_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> hex_decode(std::string_view hex);

}  // namespace fpix::crypto
