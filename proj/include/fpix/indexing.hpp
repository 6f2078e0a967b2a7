// Image signatures: singular values (one-sided Jacobi SVD), normalized
// intensity histogram, and covariance eigenvalues (PCA baseline).
#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fpix/image.hpp"
#include "fpix/matrix.hpp"

namespace fpix {

class IndexingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a Jacobi iteration hits its sweep cap.
class ConvergenceError : public IndexingError {
public:
    ConvergenceError(const std::string& what, double residual)
        : IndexingError(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

enum class IndexMode : std::uint8_t { Svd = 0x01, Hist = 0x02, Pca = 0x03 };

std::string_view to_string(IndexMode mode);
IndexMode parse_index_mode(std::string_view name);
bool is_valid_mode_byte(std::uint8_t b);

inline constexpr std::size_t kDefaultIndexDim = 64;
inline constexpr std::size_t kHistogramBins = 256;

struct IndexVector {
    IndexMode mode = IndexMode::Svd;
    std::vector<double> components;

    std::size_t dim() const noexcept { return components.size(); }

    friend bool operator==(const IndexVector&, const IndexVector&) = default;
};

/// Checks the per-mode shape rules: SVD/PCA non-negative and non-increasing,
/// HIST 256 non-negative bins summing to one.
bool satisfies_mode_invariants(const IndexVector& v);

struct SvdFactors {
    RealMatrix u;  // m x r
    std::vector<double> s;
    RealMatrix v;  // n x r
};

inline constexpr int kMaxJacobiSweeps = 60;
inline constexpr double kJacobiTolerance = 1e-12;

/// Thin SVD A = U diag(S) V^T by one-sided (Hestenes) Jacobi rotations on the
/// columns of A, r = min(m, n). Singular values come back non-increasing.
SvdFactors svd(const RealMatrix& a);

/// First k singular values of svd(a), zero-padded when min(m, n) < k.
IndexVector singular_value_index(const RealMatrix& a, std::size_t k = kDefaultIndexDim);

/// 256-bin intensity histogram normalized by the pixel count.
IndexVector histogram_index(const GrayImage& img);

/// Eigenvalues of the symmetric matrix, non-increasing, by cyclic Jacobi.
std::vector<double> symmetric_eigenvalues(const RealMatrix& sym);

/// Sample covariance (1/(m-1)) C^T C of the column-centered matrix.
RealMatrix sample_covariance(const RealMatrix& a);

/// Top-k covariance eigenvalues, clamped at zero and zero-padded.
IndexVector pca_index(const RealMatrix& a, std::size_t k = kDefaultIndexDim);

/// Dispatches on mode; `k` is ignored for HIST.
IndexVector compute_index(const GrayImage& img, IndexMode mode, std::size_t k);

}  // namespace fpix
