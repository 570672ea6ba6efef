#pragma once

// Strongly convex data-fidelity terms.
//
// Every term models the SmoothTerm concept used by the solvers: value, prox,
// the shifted prox K2 and its strong-convexity modulus s. Terms that are
// actually differentiable also model DifferentiableTerm (gradient and its
// Lipschitz constant σ), which the direct DR iterations and ISTA require.

#include <wcdr/error.hpp>
#include <wcdr/linalg.hpp>

#include <algorithm>
#include <concepts>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace wcdr {

template <class T>
concept SmoothTerm = requires(const T& f, const Vector& x, double a) {
    { f.value(x) } -> std::convertible_to<double>;
    { f.prox(x, a) } -> std::convertible_to<Vector>;
    { f.shifted_prox(x, a, a) } -> std::convertible_to<Vector>;
    { f.strong_convexity() } -> std::convertible_to<double>;
    { f.dimension() } -> std::convertible_to<Eigen::Index>;
};

template <class T>
concept DifferentiableTerm = SmoothTerm<T> && requires(const T& f, const Vector& x) {
    { f.gradient(x) } -> std::convertible_to<Vector>;
    { f.lipschitz() } -> std::convertible_to<double>;
};

namespace detail {

// Tolerance used when comparing a shift modulus against s; build_instance sets
// ρ = s from the same eigenvalue, so equality must survive rounding.
inline constexpr double shift_slack = 1e-12;

inline void check_shift(double alpha, double rho, double s)
{
    require(alpha > 0.0, ErrorCode::invalid_argument, "prox step must be positive");
    require(rho >= 0.0, ErrorCode::invalid_argument, "shift modulus must be nonnegative");
    require(alpha * rho < 1.0, ErrorCode::step_too_large,
            "shifted prox K2 needs alpha*rho < 1 (alpha = " + std::to_string(alpha) +
                ", rho = " + std::to_string(rho) + ")");
    require(rho <= s * (1.0 + shift_slack), ErrorCode::shifted_term_nonconvex,
            "f - (rho/2)|x|^2 is nonconvex: rho = " + std::to_string(rho) +
                " exceeds s = " + std::to_string(s));
}

} // namespace detail

/// f(x) = ½‖y − Hx‖² with full-column-rank H.
///
/// Prox solves (I + αHᵀH) z = x + αHᵀy. Cholesky factors are cached per α
/// behind a mutex; copies of a term share the cache.
class QuadraticTerm {
public:
    QuadraticTerm(LinearMap map, Vector y)
        : map_(std::move(map)), y_(std::move(y)), cache_(std::make_shared<FactorCache>())
    {
        detail::require(y_.size() == map_.rows(), ErrorCode::dimension_mismatch,
                        "observation length does not match operator rows");
        extremes_ = gram_extreme_eigenvalues(map_);
        hty_ = map_.adjoint_apply(y_);
        gram_ = map_.matrix().transpose() * map_.matrix();
    }

    const LinearMap& map() const noexcept { return map_; }
    const Vector& observation() const noexcept { return y_; }
    Eigen::Index dimension() const noexcept { return map_.cols(); }
    double strong_convexity() const noexcept { return extremes_.s; }
    double lipschitz() const noexcept { return extremes_.sigma; }

    double value(const Vector& x) const { return 0.5 * (y_ - map_.apply(x)).squaredNorm(); }

    Vector gradient(const Vector& x) const { return map_.adjoint_apply(map_.apply(x) - y_); }

    Vector prox(const Vector& x, double alpha) const
    {
        detail::require(alpha > 0.0, ErrorCode::invalid_argument, "prox step must be positive");
        detail::require(x.size() == dimension(), ErrorCode::dimension_mismatch,
                        "quadratic prox: wrong argument length");
        return factor(alpha)->solve(x + alpha * hty_);
    }

    /// K2(x) = J_{β₂f}(β₂x/α), β₂ = α/(1 − αρ): the prox of f − (ρ/2)‖·‖².
    Vector shifted_prox(const Vector& x, double alpha, double rho) const
    {
        detail::check_shift(alpha, rho, strong_convexity());
        const double beta2 = alpha / (1.0 - alpha * rho);
        return prox((beta2 / alpha) * x, beta2);
    }

private:
    struct FactorCache {
        std::mutex mutex;
        std::map<double, std::shared_ptr<const SpdFactor>> factors;
    };

    std::shared_ptr<const SpdFactor> factor(double alpha) const
    {
        std::lock_guard lock(cache_->mutex);
        auto it = cache_->factors.find(alpha);
        if (it != cache_->factors.end()) return it->second;
        if (cache_->factors.size() >= max_cached) cache_->factors.clear();
        Matrix a = alpha * gram_;
        a.diagonal().array() += 1.0;
        auto f = std::make_shared<const SpdFactor>(a);
        cache_->factors.emplace(alpha, f);
        return f;
    }

    static constexpr std::size_t max_cached = 8;

    LinearMap map_;
    Vector y_;
    Vector hty_;
    Matrix gram_;
    GramExtremes extremes_{};
    std::shared_ptr<FactorCache> cache_;
};

inline double quad_eval(const QuadraticTerm& f, const Vector& x) { return f.value(x); }
inline Vector quad_grad(const QuadraticTerm& f, const Vector& x) { return f.gradient(x); }
inline Vector quad_prox(const QuadraticTerm& f, const Vector& x, double alpha)
{
    return f.prox(x, alpha);
}
inline Vector shifted_prox_K2(const QuadraticTerm& f, const Vector& x, double alpha, double rho)
{
    return f.shifted_prox(x, alpha, rho);
}

/// Coordinate subspace K = {x : x_i = 0 for i outside the support}.
class CoordinateSubspace {
public:
    CoordinateSubspace(Eigen::Index dimension, const std::vector<Eigen::Index>& support)
        : mask_(static_cast<std::size_t>(dimension), 0)
    {
        for (auto i : support) {
            detail::require(i >= 0 && i < dimension, ErrorCode::invalid_argument,
                            "support index out of range");
            mask_[static_cast<std::size_t>(i)] = 1;
        }
    }

    static CoordinateSubspace full(Eigen::Index dimension)
    {
        CoordinateSubspace k(dimension, {});
        std::fill(k.mask_.begin(), k.mask_.end(), 1);
        return k;
    }

    Eigen::Index dimension() const noexcept { return static_cast<Eigen::Index>(mask_.size()); }
    bool contains(Eigen::Index i) const { return mask_[static_cast<std::size_t>(i)] != 0; }

    bool contains(const Vector& x) const
    {
        for (Eigen::Index i = 0; i < x.size(); ++i)
            if (!contains(i) && x[i] != 0.0) return false;
        return true;
    }

private:
    std::vector<char> mask_;
};

/// Orthogonal projection onto K; the prox of i_K for every step.
inline Vector projection_prox(const CoordinateSubspace& support, const Vector& z)
{
    detail::require(z.size() == support.dimension(), ErrorCode::dimension_mismatch,
                    "projection: wrong argument length");
    Vector p = z;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (!support.contains(i)) p[i] = 0.0;
    return p;
}

/// f(x) = ½‖y − x‖² + i_K(x). Strongly convex with s = 1 but not smooth, so it
/// is only usable with the shifted iterations.
class SubspaceQuadraticTerm {
public:
    SubspaceQuadraticTerm(Vector y, CoordinateSubspace support)
        : y_(std::move(y)), support_(std::move(support))
    {
        detail::require(y_.size() == support_.dimension(), ErrorCode::dimension_mismatch,
                        "observation length does not match subspace dimension");
    }

    const Vector& observation() const noexcept { return y_; }
    const CoordinateSubspace& support() const noexcept { return support_; }
    Eigen::Index dimension() const noexcept { return y_.size(); }
    double strong_convexity() const noexcept { return 1.0; }

    double value(const Vector& x) const
    {
        if (!support_.contains(x)) return std::numeric_limits<double>::infinity();
        return 0.5 * (y_ - x).squaredNorm();
    }

    /// P_K((z + αy)/(1 + α)).
    Vector prox(const Vector& z, double alpha) const
    {
        detail::require(alpha > 0.0, ErrorCode::invalid_argument, "prox step must be positive");
        detail::require(z.size() == dimension(), ErrorCode::dimension_mismatch,
                        "subspace prox: wrong argument length");
        return projection_prox(support_, (z + alpha * y_) / (1.0 + alpha));
    }

    Vector shifted_prox(const Vector& x, double alpha, double rho) const
    {
        detail::check_shift(alpha, rho, strong_convexity());
        const double beta2 = alpha / (1.0 - alpha * rho);
        return prox((beta2 / alpha) * x, beta2);
    }

private:
    Vector y_;
    CoordinateSubspace support_;
};

inline Vector subspace_prox(const SubspaceQuadraticTerm& f, const Vector& z, double alpha)
{
    return f.prox(z, alpha);
}

static_assert(DifferentiableTerm<QuadraticTerm>);
static_assert(SmoothTerm<SubspaceQuadraticTerm> && !DifferentiableTerm<SubspaceQuadraticTerm>);

} // namespace wcdr
