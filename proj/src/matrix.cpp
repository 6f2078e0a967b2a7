#include "fpix/matrix.hpp"

#include <cmath>
#include <string>

namespace fpix {

RealMatrix::RealMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

RealMatrix::RealMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
        throw std::invalid_argument("RealMatrix: " + std::to_string(data_.size()) +
                                    " entries for a " + std::to_string(rows_) + "x" +
                                    std::to_string(cols_) + " matrix");
    }
}

RealMatrix RealMatrix::identity(std::size_t n) {
    RealMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

RealMatrix RealMatrix::transposed() const {
    RealMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double RealMatrix::frobenius_norm() const {
    double sum = 0.0;
    for (double v : data_) sum += v * v;
    return std::sqrt(sum);
}

bool RealMatrix::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

RealMatrix operator*(const RealMatrix& a, const RealMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: inner dimensions differ");
    RealMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

RealMatrix operator-(const RealMatrix& a, const RealMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("matrix difference: shapes differ");
    RealMatrix c = a;
    auto out = c.entries();
    auto rhs = b.entries();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= rhs[i];
    return c;
}

}  // namespace fpix
