#include "fpix/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace fpix {

GrayImage::GrayImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width_ == 0 || height_ == 0) throw ImageError("image dimensions must be positive");
    if (pixels_.size() != width_ * height_) {
        throw ImageError("pixel count " + std::to_string(pixels_.size()) + " does not match " +
                         std::to_string(width_) + "x" + std::to_string(height_));
    }
}

GrayImage::GrayImage(std::size_t width, std::size_t height, std::uint8_t fill)
    : GrayImage(width, height, std::vector<std::uint8_t>(width * height, fill)) {}

namespace {

bool is_space(std::uint8_t c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

// Token reader over the PGM byte stream. '#' starts a comment running to the
// end of the line.
class PgmReader {
public:
    explicit PgmReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t offset() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

    void skip_separators() {
        while (pos_ < bytes_.size()) {
            if (is_space(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
            } else {
                break;
            }
        }
    }

    // Returns false at end of input. Throws on a non-digit token.
    bool read_unsigned(std::uint64_t& value, const char* field) {
        skip_separators();
        if (pos_ >= bytes_.size()) return false;
        const std::size_t start = pos_;
        value = 0;
        while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
            if (value > 1'000'000'000ull) {
                throw PgmError(std::string("PGM ") + field + " at byte offset " +
                               std::to_string(start) + ": value too large");
            }
            value = value * 10 + (bytes_[pos_] - '0');
            ++pos_;
        }
        if (pos_ == start || (pos_ < bytes_.size() && !is_space(bytes_[pos_]) && bytes_[pos_] != '#')) {
            throw PgmError(std::string("PGM ") + field + " at byte offset " + std::to_string(start) +
                           ": expected a decimal integer");
        }
        return true;
    }

    std::uint8_t byte() { return bytes_[pos_++]; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

std::uint64_t read_header_field(PgmReader& reader, const char* field, std::uint64_t lo,
                                std::uint64_t hi) {
    std::uint64_t value = 0;
    if (!reader.read_unsigned(value, field)) {
        throw PgmError(std::string("PGM ") + field + ": header truncated at byte offset " +
                       std::to_string(reader.offset()));
    }
    if (value < lo || value > hi) {
        throw PgmError(std::string("PGM ") + field + " " + std::to_string(value) +
                       " out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return value;
}

}  // namespace

GrayImage load_pgm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P') throw PgmError("PGM magic: not a netpbm file");
    const std::uint8_t kind = bytes[1];
    if (kind != '5' && kind != '2') {
        throw PgmError(std::string("PGM magic: unsupported format P") + static_cast<char>(kind));
    }
    if (bytes.size() > 2 && !is_space(bytes[2]) && bytes[2] != '#') {
        throw PgmError("PGM magic: missing separator after magic number");
    }

    PgmReader reader(bytes.subspan(2));
    const auto width = read_header_field(reader, "width", 1, kMaxPgmDimension);
    const auto height = read_header_field(reader, "height", 1, kMaxPgmDimension);
    const auto maxval = read_header_field(reader, "maxval", 1, 255);

    const std::size_t count = width * height;
    std::vector<std::uint8_t> pixels(count);

    if (kind == '5') {
        // Exactly one whitespace byte separates maxval from the raster.
        if (reader.remaining() == 0) {
            throw PgmError("PGM pixel data truncated at byte offset " +
                           std::to_string(reader.offset() + 2) + ": expected " +
                           std::to_string(count) + " bytes, got 0");
        }
        reader.byte();
        if (reader.remaining() < count) {
            throw PgmError("PGM pixel data truncated at byte offset " +
                           std::to_string(reader.offset() + 2 + reader.remaining()) +
                           ": expected " + std::to_string(count) + " bytes, got " +
                           std::to_string(reader.remaining()));
        }
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t at = reader.offset() + 2;
            const std::uint8_t v = reader.byte();
            if (v > maxval) {
                throw PgmError("PGM sample at byte offset " + std::to_string(at) + " exceeds maxval");
            }
            pixels[i] = v;
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            std::uint64_t v = 0;
            if (!reader.read_unsigned(v, "sample")) {
                throw PgmError("PGM pixel data truncated at byte offset " +
                               std::to_string(reader.offset() + 2) + ": expected " +
                               std::to_string(count) + " samples, got " + std::to_string(i));
            }
            if (v > maxval) {
                throw PgmError("PGM sample " + std::to_string(i) + " before byte offset " +
                               std::to_string(reader.offset() + 2) + " exceeds maxval");
            }
            pixels[i] = static_cast<std::uint8_t>(v);
        }
    }
    return GrayImage(width, height, std::move(pixels));
}

GrayImage load_pgm_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PgmError("cannot open image '" + path + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    try {
        return load_pgm(bytes);
    } catch (const PgmError& e) {
        throw PgmError(path + ": " + e.what());
    }
}

std::vector<std::uint8_t> write_pgm(const GrayImage& img, PgmFormat format) {
    std::ostringstream header;
    header << (format == PgmFormat::Binary ? "P5" : "P2") << '\n'
           << img.width() << ' ' << img.height() << '\n'
           << "255\n";
    const std::string h = header.str();
    std::vector<std::uint8_t> out(h.begin(), h.end());
    if (format == PgmFormat::Binary) {
        out.insert(out.end(), img.pixels().begin(), img.pixels().end());
        return out;
    }
    std::string body;
    for (std::size_t i = 0; i < img.height(); ++i) {
        for (std::size_t j = 0; j < img.width(); ++j) {
            if (j) body += ' ';
            body += std::to_string(img.at(i, j));
        }
        body += '\n';
    }
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

void write_pgm_file(const std::string& path, const GrayImage& img, PgmFormat format) {
    const auto bytes = write_pgm(img, format);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw PgmError("cannot write image '" + path + "'");
}

RealMatrix to_matrix(const GrayImage& img) {
    std::vector<double> entries(img.size());
    std::transform(img.pixels().begin(), img.pixels().end(), entries.begin(),
                   [](std::uint8_t p) { return static_cast<double>(p) / 255.0; });
    return RealMatrix(img.height(), img.width(), std::move(entries));
}

SynthKind parse_synth_kind(const std::string& name) {
    if (name == "gradient") return SynthKind::Gradient;
    if (name == "checker") return SynthKind::Checker;
    if (name == "blob") return SynthKind::Blob;
    throw ImageError("unknown synthetic image kind '" + name + "'");
}

namespace {

class Lcg64 {
public:
    explicit Lcg64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        state_ = state_ * 6364136223846793005ull + 1442695040888963407ull;
        return state_;
    }
    // High bits have the longest period.
    std::uint32_t next32() { return static_cast<std::uint32_t>(next() >> 32); }

private:
    std::uint64_t state_;
};

// exp(-x) for x >= 0 built from IEEE add/mul/div only, so the result does not
// depend on the platform libm: halve the argument 8 times, Taylor to degree 6,
// then square back up.
double exp_neg(double x) {
    if (x > 40.0) return 0.0;
    const double r = x / 256.0;
    double t = 1.0 - r * (1.0 - r / 2.0 * (1.0 - r / 3.0 * (1.0 - r / 4.0 * (1.0 - r / 5.0 * (1.0 - r / 6.0)))));
    for (int i = 0; i < 8; ++i) t *= t;
    return t;
}

GrayImage make_blob(std::size_t width, std::size_t height, std::uint64_t seed) {
    Lcg64 rng(seed);
    struct Spot {
        double cx, cy, inv_two_sigma2, amplitude;
    };
    const std::size_t spot_count = 4 + rng.next32() % 5;
    const std::uint32_t sigma_range = static_cast<std::uint32_t>(std::max<std::size_t>(1, std::min(width, height) / 4));
    std::vector<Spot> spots;
    spots.reserve(spot_count);
    for (std::size_t s = 0; s < spot_count; ++s) {
        const double cx = static_cast<double>(rng.next32() % width);
        const double cy = static_cast<double>(rng.next32() % height);
        const double sigma = 1.0 + static_cast<double>(rng.next32() % sigma_range);
        const double amplitude = 64.0 + static_cast<double>(rng.next32() % 192);
        spots.push_back({cx, cy, 1.0 / (2.0 * sigma * sigma), amplitude});
    }
    std::vector<std::uint8_t> pixels(width * height);
    for (std::size_t i = 0; i < height; ++i) {
        for (std::size_t j = 0; j < width; ++j) {
            double v = 0.0;
            for (const auto& sp : spots) {
                const double dy = static_cast<double>(i) - sp.cy;
                const double dx = static_cast<double>(j) - sp.cx;
                v += sp.amplitude * exp_neg((dx * dx + dy * dy) * sp.inv_two_sigma2);
            }
            pixels[i * width + j] = static_cast<std::uint8_t>(std::min(255.0, std::floor(v)));
        }
    }
    return GrayImage(width, height, std::move(pixels));
}

}  // namespace

GrayImage synth_image(SynthKind kind, std::size_t width, std::size_t height, std::uint64_t seed) {
    if (width == 0 || height == 0) throw ImageError("synthetic image dimensions must be positive");
    std::vector<std::uint8_t> pixels(width * height);
    switch (kind) {
        case SynthKind::Gradient: {
            const std::size_t denom = width + height - 2;
            for (std::size_t i = 0; i < height; ++i)
                for (std::size_t j = 0; j < width; ++j)
                    pixels[i * width + j] =
                        denom == 0 ? 0 : static_cast<std::uint8_t>(255 * (i + j) / denom);
            return GrayImage(width, height, std::move(pixels));
        }
        case SynthKind::Checker:
            for (std::size_t i = 0; i < height; ++i)
                for (std::size_t j = 0; j < width; ++j)
                    pixels[i * width + j] = ((i + j) % 2) ? 255 : 0;
            return GrayImage(width, height, std::move(pixels));
        case SynthKind::Blob:
            return make_blob(width, height, seed);
    }
    throw ImageError("unknown synthetic image kind");
}

GrayImage rotate90(const GrayImage& img, int quarter_turns) {
    const int turns = ((quarter_turns % 4) + 4) % 4;
    GrayImage out = img;
    for (int t = 0; t < turns; ++t) {
        const std::size_t w = out.width();
        const std::size_t h = out.height();
        std::vector<std::uint8_t> px(w * h);
        // New image is h wide and w tall; new(i, j) = old(h - 1 - j, i).
        for (std::size_t i = 0; i < w; ++i)
            for (std::size_t j = 0; j < h; ++j) px[i * h + j] = out.at(h - 1 - j, i);
        out = GrayImage(h, w, std::move(px));
    }
    return out;
}

GrayImage translate_wrap(const GrayImage& img, long dx, long dy) {
    const long w = static_cast<long>(img.width());
    const long h = static_cast<long>(img.height());
    const long sx = ((dx % w) + w) % w;
    const long sy = ((dy % h) + h) % h;
    std::vector<std::uint8_t> px(img.size());
    for (long i = 0; i < h; ++i)
        for (long j = 0; j < w; ++j)
            px[static_cast<std::size_t>(((i + sy) % h) * w + (j + sx) % w)] =
                img.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    return GrayImage(img.width(), img.height(), std::move(px));
}

}  // namespace fpix
