#include "fpix/indexing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fpix {

std::string_view to_string(IndexMode mode) {
    switch (mode) {
        case IndexMode::Svd: return "svd";
        case IndexMode::Hist: return "hist";
        case IndexMode::Pca: return "pca";
    }
    return "?";
}

IndexMode parse_index_mode(std::string_view name) {
    if (name == "svd" || name == "SVD") return IndexMode::Svd;
    if (name == "hist" || name == "HIST") return IndexMode::Hist;
    if (name == "pca" || name == "PCA") return IndexMode::Pca;
    throw IndexingError("unknown index mode '" + std::string(name) + "'");
}

bool is_valid_mode_byte(std::uint8_t b) { return b >= 0x01 && b <= 0x03; }

bool satisfies_mode_invariants(const IndexVector& v) {
    if (v.components.empty()) return false;
    for (double c : v.components)
        if (!std::isfinite(c) || c < 0.0) return false;
    if (v.mode == IndexMode::Hist) {
        if (v.dim() != kHistogramBins) return false;
        const double sum = std::accumulate(v.components.begin(), v.components.end(), 0.0);
        return std::abs(sum - 1.0) <= 1e-12;
    }
    return std::is_sorted(v.components.begin(), v.components.end(), std::greater<>());
}

namespace {

double dot(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

// Column-major working copy used by the one-sided Jacobi sweeps.
struct JacobiResult {
    std::vector<std::vector<double>> cols;  // orthogonalized columns of A (m x n)
    std::vector<std::vector<double>> v;     // accumulated rotations (n x n), column-major
};

// Requires m >= n.
// Columns whose squared norm is at or below `zero2` count as numerically zero:
// they take no part in rotations and get singular value 0.
JacobiResult hestenes(const RealMatrix& a, double zero2) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    JacobiResult r;
    r.cols.assign(n, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) r.cols[j][i] = a(i, j);
    r.v.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) r.v[j][j] = 1.0;

    std::vector<double> norm2(n);
    double worst = 0.0;
    for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
        for (std::size_t j = 0; j < n; ++j) norm2[j] = dot(r.cols[j], r.cols[j]);
        bool rotated = false;
        worst = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double alpha = norm2[p];
                const double beta = norm2[q];
                if (alpha <= zero2 || beta <= zero2) continue;
                const double gamma = dot(r.cols[p], r.cols[q]);
                const double scale = std::sqrt(alpha) * std::sqrt(beta);
                if (std::abs(gamma) <= kJacobiTolerance * scale ||
                    std::abs(gamma) < std::numeric_limits<double>::min())
                    continue;
                worst = std::max(worst, std::abs(gamma) / scale);
                rotated = true;

                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
                const double c = 1.0 / std::hypot(1.0, t);
                const double s = c * t;

                // Norms are re-accumulated from the rotated entries; the
                // update formulas alpha - t*gamma cancel badly once a column
                // is reduced to rounding noise.
                double* cp = r.cols[p].data();
                double* cq = r.cols[q].data();
                double np = 0.0;
                double nq = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    const double xp = cp[i];
                    const double xq = cq[i];
                    cp[i] = c * xp - s * xq;
                    cq[i] = s * xp + c * xq;
                    np += cp[i] * cp[i];
                    nq += cq[i] * cq[i];
                }
                norm2[p] = np;
                norm2[q] = nq;
                double* vp = r.v[p].data();
                double* vq = r.v[q].data();
                for (std::size_t i = 0; i < n; ++i) {
                    const double xp = vp[i];
                    const double xq = vq[i];
                    vp[i] = c * xp - s * xq;
                    vq[i] = s * xp + c * xq;
                }
            }
        }
        if (!rotated) return r;
    }
    throw ConvergenceError("svd: no convergence after " + std::to_string(kMaxJacobiSweeps) +
                               " sweeps (largest relative column inner product " +
                               std::to_string(worst) + ")",
                           worst);
}

void require_finite(const RealMatrix& a, const char* who) {
    if (a.rows() == 0 || a.cols() == 0) throw IndexingError(std::string(who) + ": empty matrix");
    if (!a.all_finite()) throw IndexingError(std::string(who) + ": non-finite input");
}

std::vector<std::size_t> order_by_norm(const std::vector<double>& sigma) {
    std::vector<std::size_t> order(sigma.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });
    return order;
}

// Fills the columns flagged in `missing` with unit vectors orthogonal to every
// other column of `u` (m x r, column-major). Each gap takes the standard basis
// vector with the largest residual after projection; the squared residuals
// sum to the missing dimension, so the best one has norm >= 1/sqrt(m).
void complete_orthonormal(std::vector<std::vector<double>>& u, const std::vector<bool>& missing) {
    if (std::none_of(missing.begin(), missing.end(), [](bool b) { return b; })) return;
    const std::size_t m = u.front().size();
    std::vector<std::size_t> basis;
    for (std::size_t j = 0; j < u.size(); ++j)
        if (!missing[j]) basis.push_back(j);

    const auto project_out = [&](std::vector<double>& e) {
        for (std::size_t b : basis) {
            const double proj = dot(u[b], e);
            for (std::size_t i = 0; i < m; ++i) e[i] -= proj * u[b][i];
        }
    };
    // resid[k] = (I - U U^T) e_k, projected twice for stability.
    std::vector<std::vector<double>> resid(m, std::vector<double>(m, 0.0));
    for (std::size_t k = 0; k < m; ++k) {
        resid[k][k] = 1.0;
        project_out(resid[k]);
        project_out(resid[k]);
    }
    for (std::size_t j = 0; j < u.size(); ++j) {
        if (!missing[j]) continue;
        std::size_t pick = 0;
        double best = -1.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double n2 = dot(resid[k], resid[k]);
            if (n2 > best) {
                best = n2;
                pick = k;
            }
        }
        std::vector<double> q = resid[pick];
        project_out(q);
        const double norm = std::sqrt(dot(q, q));
        for (double& x : q) x /= norm;
        for (auto& r : resid) {
            const double proj = dot(q, r);
            for (std::size_t i = 0; i < m; ++i) r[i] -= proj * q[i];
        }
        u[j] = std::move(q);
        basis.push_back(j);
    }
}

SvdFactors svd_tall(const RealMatrix& a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    // Rank cutoff: without it a column reduced to rounding noise can never
    // pass the relative orthogonality test against a large one and is
    // rotated until its norm underflows.
    const double zero = static_cast<double>(std::max(m, n)) * std::numeric_limits<double>::epsilon() *
                        a.frobenius_norm();
    const double zero2 = zero * zero;
    JacobiResult jr = hestenes(a, zero2);

    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double n2 = dot(jr.cols[j], jr.cols[j]);
        sigma[j] = n2 <= zero2 ? 0.0 : std::sqrt(n2);
    }
    const auto order = order_by_norm(sigma);

    SvdFactors f{RealMatrix(m, n), std::vector<double>(n), RealMatrix(n, n)};
    std::vector<std::vector<double>> ucols(n);
    std::vector<bool> missing(n, false);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = order[k];
        f.s[k] = sigma[j];
        for (std::size_t i = 0; i < n; ++i) f.v(i, k) = jr.v[j][i];
        if (sigma[j] > 0.0) {
            ucols[k] = jr.cols[j];
            for (double& x : ucols[k]) x /= sigma[j];
        } else {
            ucols[k].assign(m, 0.0);
            missing[k] = true;
        }
    }
    complete_orthonormal(ucols, missing);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < m; ++i) f.u(i, k) = ucols[k][i];
    return f;
}

}  // namespace

SvdFactors svd(const RealMatrix& a) {
    require_finite(a, "svd");
    if (a.rows() >= a.cols()) return svd_tall(a);
    SvdFactors t = svd_tall(a.transposed());
    return SvdFactors{std::move(t.v), std::move(t.s), std::move(t.u)};
}

IndexVector singular_value_index(const RealMatrix& a, std::size_t k) {
    if (k == 0) throw IndexingError("index dimension must be at least 1");
    std::vector<double> sigma = svd(a).s;
    sigma.resize(k, 0.0);
    return IndexVector{IndexMode::Svd, std::move(sigma)};
}

IndexVector histogram_index(const GrayImage& img) {
    if (img.empty()) throw IndexingError("histogram of an empty image");
    std::vector<std::size_t> counts(kHistogramBins, 0);
    for (std::uint8_t p : img.pixels()) ++counts[p];
    const double total = static_cast<double>(img.size());
    std::vector<double> bins(kHistogramBins);
    for (std::size_t b = 0; b < kHistogramBins; ++b) bins[b] = static_cast<double>(counts[b]) / total;
    return IndexVector{IndexMode::Hist, std::move(bins)};
}

RealMatrix sample_covariance(const RealMatrix& a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (m < 2) throw IndexingError("pca: sample covariance needs at least 2 rows");
    std::vector<double> mean(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) mean[j] += a(i, j);
    for (double& x : mean) x /= static_cast<double>(m);

    RealMatrix c(n, n);
    std::vector<double> row(n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) row[j] = a(i, j) - mean[j];
        for (std::size_t p = 0; p < n; ++p) {
            const double rp = row[p];
            double* out = &c(p, 0);
            for (std::size_t q = p; q < n; ++q) out[q] += rp * row[q];
        }
    }
    const double scale = 1.0 / static_cast<double>(m - 1);
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = p; q < n; ++q) {
            c(p, q) *= scale;
            c(q, p) = c(p, q);
        }
    return c;
}

std::vector<double> symmetric_eigenvalues(const RealMatrix& sym) {
    const std::size_t n = sym.rows();
    if (n == 0 || sym.cols() != n) throw IndexingError("eigenvalues: matrix must be square");
    if (!sym.all_finite()) throw IndexingError("eigenvalues: non-finite input");

    // Row-major copy with a padded stride (a power-of-two stride maps every
    // column access to the same cache set).
    const std::size_t ld = n + 8;
    std::vector<double> buf(n * ld, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) buf[i * ld + j] = sym(i, j);
    double* a = buf.data();

    // A rotation on (p, q) only writes rows p and q. The mirrored column
    // entries are left stale: for i != j the true value of (i, j) sits in
    // whichever of rows i, j was rotated more recently, tracked by `stamp`.
    std::vector<std::uint64_t> stamp(n, 0);
    std::uint64_t clock = 0;
    const auto entry = [&](std::size_t i, std::size_t j) {
        return stamp[i] >= stamp[j] ? a[i * ld + j] : a[j * ld + i];
    };
    const auto refresh_row = [&](std::size_t r) {
        const std::uint64_t own = stamp[r];
        if (own == clock) return;
        double* row = a + r * ld;
        for (std::size_t k = 0; k < n; ++k)
            if (stamp[k] > own) row[k] = a[k * ld + r];
    };

    const double floor = 1e-30 * sym.frobenius_norm();
    double worst = 0.0;
    for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
        bool rotated = false;
        worst = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = entry(p, q);
                const double app = a[p * ld + p];
                const double aqq = a[q * ld + q];
                const double scale = std::sqrt(std::abs(app)) * std::sqrt(std::abs(aqq));
                if (std::abs(apq) <= kJacobiTolerance * scale || std::abs(apq) <= floor) continue;
                worst = std::max(worst, scale > 0.0 ? std::abs(apq) / scale : std::abs(apq));
                rotated = true;

                const double theta = (aqq - app) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(1.0, theta));
                const double c = 1.0 / std::hypot(1.0, t);
                const double s = c * t;

                refresh_row(p);
                refresh_row(q);
                double* rp = a + p * ld;
                double* rq = a + q * ld;
                for (std::size_t k = 0; k < n; ++k) {
                    const double xp = rp[k];
                    const double xq = rq[k];
                    rp[k] = c * xp - s * xq;
                    rq[k] = s * xp + c * xq;
                }
                rp[p] = app - t * apq;
                rq[q] = aqq + t * apq;
                rp[q] = 0.0;
                rq[p] = 0.0;
                ++clock;
                stamp[p] = clock;
                stamp[q] = clock;
            }
        }
        if (!rotated) {
            std::vector<double> eig(n);
            for (std::size_t i = 0; i < n; ++i) eig[i] = a[i * ld + i];
            std::stable_sort(eig.begin(), eig.end(), std::greater<>());
            return eig;
        }
    }
    throw ConvergenceError("eigenvalues: no convergence after " + std::to_string(kMaxJacobiSweeps) +
                               " sweeps (largest relative off-diagonal " + std::to_string(worst) + ")",
                           worst);
}

IndexVector pca_index(const RealMatrix& a, std::size_t k) {
    if (k == 0) throw IndexingError("index dimension must be at least 1");
    require_finite(a, "pca");
    std::vector<double> eig = symmetric_eigenvalues(sample_covariance(a));
    for (double& e : eig) e = std::max(e, 0.0);
    eig.resize(k, 0.0);
    return IndexVector{IndexMode::Pca, std::move(eig)};
}

IndexVector compute_index(const GrayImage& img, IndexMode mode, std::size_t k) {
    switch (mode) {
        case IndexMode::Svd: return singular_value_index(to_matrix(img), k);
        case IndexMode::Hist: return histogram_index(img);
        case IndexMode::Pca: return pca_index(to_matrix(img), k);
    }
    throw IndexingError("unknown index mode");
}

}  // namespace fpix
