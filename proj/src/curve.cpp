#include "fpix/crypto/curve.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "fpix/crypto/errors.hpp"

namespace fpix::crypto {

namespace {

CurveParams make_toy() {
    CurveParams c;
    c.name = "toy";
    c.p = 17;
    c.a = 2;
    c.b = 2;
    c.g = ECPoint(5, 1);
    c.n = 19;
    c.h = 1;
    return c;
}

CurveParams make_secp192r1() {
    CurveParams c;
    c.name = "secp192r1";
    c.p = from_hex("fffffffffffffffffffffffffffffffeffffffffffffffff");
    c.a = from_hex("fffffffffffffffffffffffffffffffefffffffffffffffc");
    c.b = from_hex("64210519e59c80e70fa7e9ab72243049feb8deecc146b9b1");
    c.g = ECPoint(from_hex("188da80eb03090f67cbf20eb43a18800f4ff0afd82ff1012"),
                  from_hex("07192b95ffc8da78631011ed6b24cdd573f977a11e794811"));
    c.n = from_hex("ffffffffffffffffffffffff99def836146bc9b1b4d22831");
    c.h = 1;
    return c;
}

void require_on_curve(const ECPoint& pt, const CurveParams& curve, const char* op) {
    if (!is_on_curve(pt, curve)) throw PointError(std::string(op) + ": operand not on curve " + curve.name);
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

// Group law without on-curve checks; callers validate once at the boundary.
ECPoint raw_double(const ECPoint& pt, const CurveParams& c) {
    if (pt.is_identity() || pt.y() == 0) return ECPoint::identity();
    const BigInt lambda = mod((3 * pt.x() * pt.x() + c.a) * mod_inverse(2 * pt.y(), c.p), c.p);
    const BigInt x3 = mod(lambda * lambda - 2 * pt.x(), c.p);
    const BigInt y3 = mod(lambda * (pt.x() - x3) - pt.y(), c.p);
    return ECPoint(x3, y3);
}

ECPoint raw_add(const ECPoint& p1, const ECPoint& p2, const CurveParams& c) {
    if (p1.is_identity()) return p2;
    if (p2.is_identity()) return p1;
    if (p1.x() == p2.x()) {
        if (mod(p1.y() + p2.y(), c.p) == 0) return ECPoint::identity();
        return raw_double(p1, c);
    }
    const BigInt lambda = mod((p2.y() - p1.y()) * mod_inverse(p2.x() - p1.x(), c.p), c.p);
    const BigInt x3 = mod(lambda * lambda - p1.x() - p2.x(), c.p);
    const BigInt y3 = mod(lambda * (p1.x() - x3) - p1.y(), c.p);
    return ECPoint(x3, y3);
}

}  // namespace

const CurveParams& toy_curve() {
    static const CurveParams curve = make_toy();
    return curve;
}

const CurveParams& secp192r1() {
    static const CurveParams curve = make_secp192r1();
    return curve;
}

const CurveParams& builtin_curve(std::string_view name) {
    if (name == "toy") return toy_curve();
    if (name == "secp192r1" || name == "p192" || name == "P-192") return secp192r1();
    throw CurveParamError("unknown builtin curve '" + std::string(name) + "'");
}

bool is_on_curve(const ECPoint& pt, const CurveParams& c) {
    if (pt.is_identity()) return true;
    if (pt.x() < 0 || pt.x() >= c.p || pt.y() < 0 || pt.y() >= c.p) return false;
    return mod(pt.y() * pt.y() - (pt.x() * pt.x() * pt.x() + c.a * pt.x() + c.b), c.p) == 0;
}

void validate_curve(const CurveParams& c) {
    const auto fail = [&](const std::string& why) {
        throw CurveParamError("curve '" + c.name + "': " + why);
    };
    if (c.p < 5 || !is_probable_prime(c.p)) fail("modulus p is not an odd prime");
    if (c.a < 0 || c.a >= c.p || c.b < 0 || c.b >= c.p) fail("coefficients must lie in [0, p)");
    if (mod(4 * c.a * c.a * c.a + 27 * c.b * c.b, c.p) == 0) fail("curve is singular");
    if (c.g.is_identity()) fail("base point is the identity");
    if (!is_on_curve(c.g, c)) fail("base point is not on the curve");
    if (c.n < 2 || !is_probable_prime(c.n)) fail("order n is not prime");
    if (c.h < 1) fail("cofactor must be positive");
    if (!scalar_mul(c.n, c.g, c).is_identity()) fail("n * G is not the identity");
}

CurveParams parse_curve_params(std::string_view text) {
    std::map<std::string, std::string> fields;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw CurveParamError("line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(std::string_view(t).substr(0, eq));
        const std::string value = trim(std::string_view(t).substr(eq + 1));
        if (!fields.emplace(key, value).second) {
            throw CurveParamError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
    }
    const auto number = [&](const char* key) {
        const auto it = fields.find(key);
        if (it == fields.end()) throw CurveParamError(std::string("missing field '") + key + "'");
        try {
            return from_hex(it->second);
        } catch (const std::invalid_argument& e) {
            throw CurveParamError(std::string("field '") + key + "': " + e.what());
        }
    };
    CurveParams c;
    c.name = fields.count("name") ? fields["name"] : "unnamed";
    c.p = number("p");
    c.a = number("a");
    c.b = number("b");
    c.g = ECPoint(number("gx"), number("gy"));
    c.n = number("n");
    c.h = number("h");
    validate_curve(c);
    return c;
}

CurveParams load_curve_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CurveParamError("cannot open curve parameter file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_curve_params(ss.str());
    } catch (const CurveParamError& e) {
        throw CurveParamError(path + ": " + e.what());
    }
}

std::string format_curve_params(const CurveParams& c) {
    std::ostringstream out;
    out << "name = " << c.name << '\n'
        << "p = " << to_hex(c.p) << '\n'
        << "a = " << to_hex(c.a) << '\n'
        << "b = " << to_hex(c.b) << '\n'
        << "gx = " << to_hex(c.g.x()) << '\n'
        << "gy = " << to_hex(c.g.y()) << '\n'
        << "n = " << to_hex(c.n) << '\n'
        << "h = " << to_hex(c.h) << '\n';
    return out.str();
}

ECPoint point_negate(const ECPoint& pt, const CurveParams& curve) {
    require_on_curve(pt, curve, "point_negate");
    if (pt.is_identity()) return pt;
    return ECPoint(pt.x(), mod(-pt.y(), curve.p));
}

ECPoint point_add(const ECPoint& lhs, const ECPoint& rhs, const CurveParams& curve) {
    require_on_curve(lhs, curve, "point_add");
    require_on_curve(rhs, curve, "point_add");
    return raw_add(lhs, rhs, curve);
}

ECPoint point_double(const ECPoint& pt, const CurveParams& curve) {
    require_on_curve(pt, curve, "point_double");
    return raw_double(pt, curve);
}

ECPoint scalar_mul(const BigInt& k, const ECPoint& pt, const CurveParams& curve) {
    require_on_curve(pt, curve, "scalar_mul");
    if (k < 0) throw std::invalid_argument("scalar_mul: negative scalar");
    ECPoint acc = ECPoint::identity();
    for (std::size_t bit = bit_length(k); bit-- > 0;) {
        acc = raw_double(acc, curve);
        if (boost::multiprecision::bit_test(k, static_cast<unsigned>(bit))) acc = raw_add(acc, pt, curve);
    }
    return acc;
}

std::vector<std::uint8_t> encode_point(const ECPoint& pt, const CurveParams& curve) {
    require_on_curve(pt, curve, "encode_point");
    if (pt.is_identity()) return {0x00};
    const std::size_t w = curve.coord_bytes();
    std::vector<std::uint8_t> out;
    out.reserve(1 + 2 * w);
    out.push_back(0x04);
    const auto xs = to_bytes_be(pt.x(), w);
    const auto ys = to_bytes_be(pt.y(), w);
    out.insert(out.end(), xs.begin(), xs.end());
    out.insert(out.end(), ys.begin(), ys.end());
    return out;
}

ECPoint decode_point(std::span<const std::uint8_t> bytes, const CurveParams& curve) {
    if (bytes.empty()) throw PointError("decode_point: empty encoding");
    if (bytes[0] == 0x00) {
        if (bytes.size() != 1) throw PointError("decode_point: identity encoding must be one byte");
        return ECPoint::identity();
    }
    if (bytes[0] != 0x04) {
        throw PointError("decode_point: unsupported prefix byte " + std::to_string(bytes[0]));
    }
    const std::size_t w = curve.coord_bytes();
    if (bytes.size() != 1 + 2 * w) {
        throw PointError("decode_point: expected " + std::to_string(1 + 2 * w) + " bytes, got " +
                         std::to_string(bytes.size()));
    }
    ECPoint pt(from_bytes_be(bytes.subspan(1, w)), from_bytes_be(bytes.subspan(1 + w, w)));
    if (!is_on_curve(pt, curve)) throw PointError("decode_point: point is not on curve " + curve.name);
    return pt;
}

}  // namespace fpix::crypto
