#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace fpix {

/// Dense row-major matrix of doubles with finite entries.
class RealMatrix {
public:
    RealMatrix() = default;
    RealMatrix(std::size_t rows, std::size_t cols);
    RealMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    static RealMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

    std::span<const double> entries() const noexcept { return data_; }
    std::span<double> entries() noexcept { return data_; }

    RealMatrix transposed() const;
    double frobenius_norm() const;
    bool all_finite() const;

    friend bool operator==(const RealMatrix&, const RealMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

RealMatrix operator*(const RealMatrix& a, const RealMatrix& b);
RealMatrix operator-(const RealMatrix& a, const RealMatrix& b);

}  // namespace fpix
