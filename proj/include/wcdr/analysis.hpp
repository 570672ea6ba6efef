#pragma once

// Lipschitz and contraction bounds for the reflection operators, the
// Peaceman-Rachford contraction rates, and sampling-based Lipschitz estimates
// used to check them.
//
// Notation: α step, ρ weak-convexity modulus of g, s and σ the strong
// convexity and gradient Lipschitz constants of f, γ = s/σ, η = ρ/σ.

#include <wcdr/error.hpp>
#include <wcdr/linalg.hpp>
#include <wcdr/penalty.hpp>
#include <wcdr/smooth.hpp>
#include <wcdr/solver.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <utility>

namespace wcdr {

namespace detail {

// Relative slack on step preconditions so that α computed as exactly the
// bound expression passes.
inline constexpr double bound_slack = 1e-12;

inline std::string num(double v) { return std::to_string(v); }

} // namespace detail

/// Lipschitz constant of 2J_{αf} − I for f with f − (ρ/2)‖·‖² convex and
/// σ-Lipschitz gradient.
inline double bound_Uf(double alpha, double rho, double sigma)
{
    detail::require(alpha > 0.0 && rho >= 0.0 && rho <= sigma, ErrorCode::bound_inapplicable,
                    "bound_Uf needs alpha > 0 and 0 <= rho <= sigma");
    return std::max(std::abs(1.0 - alpha * sigma) / (1.0 + alpha * sigma),
                    std::abs(1.0 - alpha * rho) / (1.0 + alpha * rho));
}

/// Lipschitz constant of 2J_{αg} − I for ρ-weakly convex g; needs αρ < 1.
inline double bound_Ug(double alpha, double rho)
{
    detail::require(alpha > 0.0 && rho >= 0.0, ErrorCode::bound_inapplicable,
                    "bound_Ug needs alpha > 0 and rho >= 0");
    detail::require(alpha * rho < 1.0, ErrorCode::bound_inapplicable,
                    "bound_Ug needs alpha*rho < 1, got " + detail::num(alpha * rho));
    return (1.0 + alpha * rho) / (1.0 - alpha * rho);
}

/// Contraction rate of T_α = (2J_{αf} − I)(2J_{αg} − I); valid for α ≤ 1/√(σs).
inline double rate_T(double alpha, double s, double rho, double sigma)
{
    detail::require(alpha > 0.0 && rho >= 0.0 && rho <= s && s <= sigma,
                    ErrorCode::bound_inapplicable, "rate_T needs 0 <= rho <= s <= sigma");
    detail::require(alpha <= (1.0 + detail::bound_slack) / std::sqrt(sigma * s),
                    ErrorCode::bound_inapplicable,
                    "rate_T needs alpha <= 1/sqrt(sigma*s) = " + detail::num(1.0 / std::sqrt(sigma * s)));
    const double a = 1.0 - alpha * alpha * s * rho;
    const double b = alpha * (s - rho);
    return (a - b) / (a + b);
}

/// Contraction rate of V_α = (2K2 − I)(2K1 − I); valid for α ≤ 1/s.
inline double rate_V(double alpha, double s, double rho, double sigma)
{
    detail::require(alpha > 0.0 && rho >= 0.0 && rho <= s && s <= sigma,
                    ErrorCode::bound_inapplicable, "rate_V needs 0 <= rho <= s <= sigma");
    detail::require(alpha <= (1.0 + detail::bound_slack) / s, ErrorCode::bound_inapplicable,
                    "rate_V needs alpha <= 1/s = " + detail::num(1.0 / s));
    const double hi = alpha * (sigma - rho);
    const double lo = alpha * (s - rho);
    return std::max(std::abs(1.0 - hi) / (1.0 + hi), (1.0 - lo) / (1.0 + lo));
}

/// The second (conditioning-free) term of rate_V.
inline double rate_V_tail(double alpha, double s, double rho)
{
    const double lo = alpha * (s - rho);
    return (1.0 - lo) / (1.0 + lo);
}

/// rate_T at α = 1/√(σs), in terms of γ = s/σ and η = ρ/σ.
inline double mu_T(double gamma, double eta)
{
    detail::require(eta >= 0.0 && eta < gamma && gamma <= 1.0, ErrorCode::bound_inapplicable,
                    "mu_T needs 0 <= eta < gamma <= 1");
    const double r = (1.0 - eta) * std::sqrt(gamma);
    return (r - (gamma - eta)) / (r + (gamma - eta));
}

/// Lower bound η/(2 − η) on rate_V at α = 1/s.
inline double v_lower_bound(double eta)
{
    detail::require(eta >= 0.0 && eta <= 1.0, ErrorCode::bound_inapplicable,
                    "v_lower_bound needs 0 <= eta <= 1");
    return eta / (2.0 - eta);
}

// ---------------------------------------------------------------------------
// Operators under study

/// Reflected resolvent 2J_{αg} − I of a penalty.
inline Vector reflect_penalty(const Penalty& g, const Vector& x, double alpha)
{
    return reflect([&g](const Vector& v, double a) { return prox_vector(g, v, a); }, x, alpha);
}

/// Reflected resolvent 2J_{αf} − I of a smooth term.
template <SmoothTerm F>
Vector reflect_smooth(const F& f, const Vector& x, double alpha)
{
    return reflect([&f](const Vector& v, double a) { return f.prox(v, a); }, x, alpha);
}

/// T_α, the unrelaxed direct composition (2J_{αf} − I)(2J_{αg} − I).
template <SmoothTerm F>
DouglasRachford<F> peaceman_rachford_T(Problem<F> problem, double alpha)
{
    return DouglasRachford<F>(std::move(problem), Variant::dr_main_fg, alpha, 1.0, true);
}

/// V_α, the unrelaxed shifted composition (2K2 − I)(2K1 − I).
template <SmoothTerm F>
DouglasRachford<F> peaceman_rachford_V(Problem<F> problem, double alpha)
{
    return DouglasRachford<F>(std::move(problem), Variant::dr_shift_fg, alpha, 1.0, true);
}

// ---------------------------------------------------------------------------
// Sampling

using Rng = std::mt19937_64;
using PointPair = std::pair<Vector, Vector>;

/// Independent pairs of Gaussian vectors. Each vector draws its own scale
/// uniformly in (0, radius/3], so samples sweep from the threshold dead zone
/// out to the pass-through zone.
class IndependentPairSampler {
public:
    IndependentPairSampler(Eigen::Index dim, double radius) : dim_(dim), radius_(radius) {}

    PointPair operator()(Rng& rng) const { return {draw(rng), draw(rng)}; }

    Vector draw(Rng& rng) const
    {
        std::uniform_real_distribution<double> scale(0.0, radius_ / 3.0);
        std::normal_distribution<double> normal;
        const double c = scale(rng);
        Vector v(dim_);
        for (auto& e : v) e = c * normal(rng);
        return v;
    }

private:
    Eigen::Index dim_;
    double radius_;
};

/// A base point from IndependentPairSampler and a partner that differs in one
/// random coordinate by at most `eps`. Probes local slopes coordinate by
/// coordinate, which is how the maximal slope of a separable map is found.
class CoordinatePerturbationSampler {
public:
    CoordinatePerturbationSampler(Eigen::Index dim, double radius, double eps)
        : base_(dim, radius), dim_(dim), eps_(eps)
    {
    }

    PointPair operator()(Rng& rng) const
    {
        Vector x = base_.draw(rng);
        Vector y = x;
        std::uniform_int_distribution<Eigen::Index> coord(0, dim_ - 1);
        std::uniform_real_distribution<double> shift(-eps_, eps_);
        y[coord(rng)] += shift(rng);
        return {std::move(x), std::move(y)};
    }

private:
    IndependentPairSampler base_;
    Eigen::Index dim_;
    double eps_;
};

/// Local dense perturbations: y = x + eps·d with d Gaussian.
class LocalPairSampler {
public:
    LocalPairSampler(Eigen::Index dim, double radius, double eps)
        : base_(dim, radius), dim_(dim), eps_(eps)
    {
    }

    PointPair operator()(Rng& rng) const
    {
        Vector x = base_.draw(rng);
        std::normal_distribution<double> normal;
        Vector d(dim_);
        for (auto& e : d) e = normal(rng);
        Vector y = x + eps_ * d;
        return {std::move(x), std::move(y)};
    }

private:
    IndependentPairSampler base_;
    Eigen::Index dim_;
    double eps_;
};

/// max ‖Op(x) − Op(y)‖ / ‖x − y‖ over sampled pairs; pairs closer than 1e-12
/// are skipped. Deterministic in `seed`.
template <class Op, class Sampler>
double empirical_lipschitz(Op&& op, Sampler&& sampler, int n_pairs, std::uint64_t seed)
{
    detail::require(n_pairs >= 1, ErrorCode::invalid_argument, "need at least one pair");
    Rng rng(seed);
    double best = 0.0;
    int used = 0;
    for (int i = 0; i < n_pairs; ++i) {
        auto [x, y] = sampler(rng);
        const double d = (x - y).norm();
        if (d < 1e-12) continue;
        ++used;
        best = std::max(best, (op(x) - op(y)).norm() / d);
    }
    detail::require(used > 0, ErrorCode::degenerate_sampler, "every sampled pair was coincident");
    return best;
}

// ---------------------------------------------------------------------------
// Tables

/// CSV table over an α grid:
///   alpha,bound_Uf,bound_Ug,rate_T,rate_V,main_gate,shift_gate
/// Entries whose preconditions fail are written as `nan`.
inline void write_rate_table(std::ostream& out, double s, double sigma, double rho,
                             std::span<const double> alphas)
{
    const auto guarded = [](auto&& fn) {
        try {
            return fn();
        } catch (const Error&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    out << "alpha,bound_Uf,bound_Ug,rate_T,rate_V,main_gate,shift_gate\n";
    out << std::setprecision(17);
    for (double a : alphas) {
        out << a << ',' << guarded([&] { return bound_Uf(a, s, sigma); }) << ','
            << guarded([&] { return bound_Ug(a, rho); }) << ','
            << guarded([&] { return rate_T(a, s, rho, sigma); }) << ','
            << guarded([&] { return rate_V(a, s, rho, sigma); }) << ','
            << (validate_step_main(a, sigma, rho).pass ? 1 : 0) << ','
            << (validate_step_shift(a, rho).pass ? 1 : 0) << '\n';
    }
}

} // namespace wcdr
