#pragma once

// Dense linear algebra substrate. Vectors and matrices are Eigen types; this
// header adds the convolution operator, Gram spectrum extremes and SPD solves.

#include <wcdr/error.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wcdr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Least and greatest eigenvalue of HᵀH.
struct GramExtremes {
    double s;     // λ_min, strong convexity of ½‖y − Hx‖²
    double sigma; // λ_max, Lipschitz constant of its gradient
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }

/// Full linear convolution as a tall Toeplitz matrix:
/// (signal_len + taps − 1) × signal_len, M(i, j) = filter[i − j].
inline Matrix convolution_matrix(std::span<const double> filter, std::size_t signal_len)
{
    detail::require(!filter.empty(), ErrorCode::invalid_filter, "filter has no taps");
    detail::require(std::any_of(filter.begin(), filter.end(), [](double t) { return t != 0.0; }),
                    ErrorCode::invalid_filter, "filter taps are all zero");
    detail::require(signal_len >= 1, ErrorCode::invalid_argument, "signal length must be positive");

    const auto taps = filter.size();
    const auto rows = static_cast<Eigen::Index>(signal_len + taps - 1);
    const auto cols = static_cast<Eigen::Index>(signal_len);
    Matrix m = Matrix::Zero(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (std::size_t k = 0; k < taps; ++k)
            m(j + static_cast<Eigen::Index>(k), j) = filter[k];
    return m;
}

/// A linear operator H with its transpose and the extreme eigenvalues of HᵀH.
/// The spectrum is computed once at construction; the object is immutable.
class LinearMap {
public:
    explicit LinearMap(Matrix matrix) : matrix_(std::move(matrix))
    {
        detail::require(matrix_.rows() > 0 && matrix_.cols() > 0, ErrorCode::invalid_argument,
                        "linear map needs a non-empty matrix");
        detail::require(matrix_.allFinite(), ErrorCode::invalid_argument,
                        "linear map has non-finite entries");
        const Matrix gram = matrix_.transpose() * matrix_;
        Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
        detail::require(eig.info() == Eigen::Success, ErrorCode::factorization_failed,
                        "symmetric eigensolver did not converge");
        gram_min_ = eig.eigenvalues().minCoeff();
        gram_max_ = eig.eigenvalues().maxCoeff();
    }

    static LinearMap identity(Eigen::Index n) { return LinearMap(Matrix::Identity(n, n)); }

    const Matrix& matrix() const noexcept { return matrix_; }
    Eigen::Index rows() const noexcept { return matrix_.rows(); }
    Eigen::Index cols() const noexcept { return matrix_.cols(); }

    Vector apply(const Vector& x) const
    {
        detail::require(x.size() == cols(), ErrorCode::dimension_mismatch,
                        "apply: expected length " + std::to_string(cols()) + ", got " +
                            std::to_string(x.size()));
        return matrix_ * x;
    }

    Vector adjoint_apply(const Vector& v) const
    {
        detail::require(v.size() == rows(), ErrorCode::dimension_mismatch,
                        "adjoint_apply: expected length " + std::to_string(rows()) + ", got " +
                            std::to_string(v.size()));
        return matrix_.transpose() * v;
    }

    /// Raw extremes of the Gram spectrum; no rank check.
    double gram_min_raw() const noexcept { return gram_min_; }
    double gram_max_raw() const noexcept { return gram_max_; }

private:
    Matrix matrix_;
    double gram_min_ = 0.0;
    double gram_max_ = 0.0;
};

inline Vector apply(const LinearMap& map, const Vector& x) { return map.apply(x); }
inline Vector adjoint_apply(const LinearMap& map, const Vector& v) { return map.adjoint_apply(v); }

/// (s, σ) of HᵀH. Throws not_strongly_convex when s < 1e-12·σ.
inline GramExtremes gram_extreme_eigenvalues(const LinearMap& map)
{
    const double lo = map.gram_min_raw();
    const double hi = map.gram_max_raw();
    detail::require(hi > 0.0 && lo >= 1e-12 * hi, ErrorCode::not_strongly_convex,
                    "HᵀH is (numerically) singular: λ_min = " + std::to_string(lo) +
                        ", λ_max = " + std::to_string(hi));
    return {lo, hi};
}

/// Cholesky factor of an SPD matrix.
class SpdFactor {
public:
    explicit SpdFactor(const Matrix& a)
    {
        detail::require(a.rows() == a.cols(), ErrorCode::dimension_mismatch,
                        "SPD factorization needs a square matrix");
        detail::require((a - a.transpose()).lpNorm<Eigen::Infinity>() <=
                            1e-12 * std::max(1.0, a.lpNorm<Eigen::Infinity>()),
                        ErrorCode::factorization_failed, "matrix is not symmetric");
        llt_.compute(a);
        detail::require(llt_.info() == Eigen::Success, ErrorCode::factorization_failed,
                        "matrix is not symmetric positive definite");
    }

    Vector solve(const Vector& b) const
    {
        detail::require(b.size() == llt_.rows(), ErrorCode::dimension_mismatch,
                        "solve: right-hand side has wrong length");
        return llt_.solve(b);
    }

private:
    Eigen::LLT<Matrix> llt_;
};

inline Vector solve_spd(const Matrix& a, const Vector& b) { return SpdFactor(a).solve(b); }

} // namespace wcdr
