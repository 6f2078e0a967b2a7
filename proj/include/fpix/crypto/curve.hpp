// Short Weierstrass curves y^2 = x^3 + ax + b over a prime field, with the
// affine chord-and-tangent group law.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fpix/crypto/bigint.hpp"

namespace fpix::crypto {

class ECPoint {
public:
    /// The point at infinity.
    ECPoint() = default;
    ECPoint(BigInt x, BigInt y) : x_(std::move(x)), y_(std::move(y)), infinity_(false) {}

    static ECPoint identity() { return {}; }

    bool is_identity() const noexcept { return infinity_; }
    const BigInt& x() const noexcept { return x_; }
    const BigInt& y() const noexcept { return y_; }

    friend bool operator==(const ECPoint& a, const ECPoint& b) {
        if (a.infinity_ || b.infinity_) return a.infinity_ == b.infinity_;
        return a.x_ == b.x_ && a.y_ == b.y_;
    }

private:
    BigInt x_ = 0;
    BigInt y_ = 0;
    bool infinity_ = true;
};

struct CurveParams {
    std::string name;
    BigInt p;
    BigInt a;
    BigInt b;
    ECPoint g;
    BigInt n;  // order of g
    BigInt h;  // cofactor

    /// Bytes per encoded coordinate: ceil(bitlen(p) / 8).
    std::size_t coord_bytes() const { return byte_length(p); }
    /// Bytes of an encoded non-identity point.
    std::size_t point_bytes() const { return 1 + 2 * coord_bytes(); }
};

/// y^2 = x^3 + 2x + 2 over F_17, generator (5, 1) of order 19.
const CurveParams& toy_curve();
/// NIST P-192 / secp192r1.
const CurveParams& secp192r1();

/// "toy" or "secp192r1"; throws CurveParamError for anything else.
const CurveParams& builtin_curve(std::string_view name);

/// Non-singular discriminant, primes p and n, G on the curve and n*G = O.
void validate_curve(const CurveParams& curve);

/// `key = hex` lines for p, a, b, gx, gy, n, h plus `name = label`. Blank
/// lines and '#' comments are ignored. The result is validated.
CurveParams parse_curve_params(std::string_view text);
CurveParams load_curve_file(const std::string& path);
std::string format_curve_params(const CurveParams& curve);

bool is_on_curve(const ECPoint& pt, const CurveParams& curve);

ECPoint point_negate(const ECPoint& pt, const CurveParams& curve);
ECPoint point_add(const ECPoint& lhs, const ECPoint& rhs, const CurveParams& curve);
ECPoint point_double(const ECPoint& pt, const CurveParams& curve);
/// Left-to-right double-and-add over the bits of k.
ECPoint scalar_mul(const BigInt& k, const ECPoint& pt, const CurveParams& curve);

/// 0x00 for the identity, else 0x04 || x || y with fixed-width coordinates.
std::vector<std::uint8_t> encode_point(const ECPoint& pt, const CurveParams& curve);
ECPoint decode_point(std::span<const std::uint8_t> bytes, const CurveParams& curve);

}  // namespace fpix::crypto
