// Byte sources for key and ephemeral-scalar generation.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fpix::crypto {

class RandomSource {
public:
    virtual ~RandomSource() = default;
    /// Fills `out` with uniform bytes or throws RngError.
    virtual void fill(std::span<std::uint8_t> out) = 0;
};

/// Operating-system entropy (getrandom).
class SystemRandom final : public RandomSource {
public:
    void fill(std::span<std::uint8_t> out) override;
};

/// Reproducible stream SHA-256(seed || counter) for tests and `--seed` runs.
/// Not suitable for protecting real data.
class SeededRandom final : public RandomSource {
public:
    explicit SeededRandom(std::uint64_t seed) : seed_(seed) {}
    void fill(std::span<std::uint8_t> out) override;

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    std::vector<std::uint8_t> pending_;
};

/// Hands out a fixed byte script, then fails. Lets tests force exact scalars.
class ReplayRandom final : public RandomSource {
public:
    explicit ReplayRandom(std::vector<std::uint8_t> script) : script_(std::move(script)) {}
    void fill(std::span<std::uint8_t> out) override;
    std::size_t remaining() const noexcept { return script_.size() - pos_; }

private:
    std::vector<std::uint8_t> script_;
    std::size_t pos_ = 0;
};

}  // namespace fpix::crypto
