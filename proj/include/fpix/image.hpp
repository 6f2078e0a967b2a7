// Grayscale raster input: PGM codec, normalization to a real matrix and the
// deterministic synthetic generators used in place of captured fingerprints.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpix/matrix.hpp"

namespace fpix {

class PgmError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ImageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// 8-bit grayscale raster, row-major.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels);
    /// Constant-intensity image.
    GrayImage(std::size_t width, std::size_t height, std::uint8_t fill = 0);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return pixels_.size(); }
    bool empty() const noexcept { return pixels_.empty(); }

    std::uint8_t at(std::size_t row, std::size_t col) const { return pixels_[row * width_ + col]; }
    std::uint8_t& at(std::size_t row, std::size_t col) { return pixels_[row * width_ + col]; }

    std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

enum class PgmFormat { Binary, Ascii };

// Largest accepted width or height.
inline constexpr std::size_t kMaxPgmDimension = 1u << 15;

GrayImage load_pgm(std::span<const std::uint8_t> bytes);
GrayImage load_pgm_file(const std::string& path);

std::vector<std::uint8_t> write_pgm(const GrayImage& img, PgmFormat format = PgmFormat::Binary);
void write_pgm_file(const std::string& path, const GrayImage& img,
                    PgmFormat format = PgmFormat::Binary);

/// Pixel (i, j) becomes entry (i, j) scaled by 1/255.
RealMatrix to_matrix(const GrayImage& img);

enum class SynthKind { Gradient, Checker, Blob };

SynthKind parse_synth_kind(const std::string& name);

/// Deterministic test raster; `seed` only affects `Blob`.
GrayImage synth_image(SynthKind kind, std::size_t width, std::size_t height, std::uint64_t seed);

/// Clockwise rotation by 90 degrees per quarter turn; negative turns rotate
/// counter-clockwise.
GrayImage rotate90(const GrayImage& img, int quarter_turns);

/// Cyclic shift: pixel (i, j) moves to ((i + dy) mod h, (j + dx) mod w).
GrayImage translate_wrap(const GrayImage& img, long dx, long dy);

}  // namespace fpix
