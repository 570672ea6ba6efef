#pragma once

// Separable weakly convex penalties g(x) = Σ_i φ(x_i).
//
// A ρ-weakly convex φ makes φ + (ρ/2)t² convex, so its prox with step α is
// single-valued as long as αρ < 1. All scalar dispatch goes through
// Penalty::{value, prox, modulus}; adding a penalty kind means adding one
// alternative to the variant and one overload set below.

#include <wcdr/error.hpp>
#include <wcdr/linalg.hpp>

#include <cmath>
#include <string>
#include <variant>

namespace wcdr {

/// Firm-threshold penalty P_{τ,ρ}:
///   τ|t| − ρt²/2    for |t| < τ/ρ,
///   τ²/(2ρ)         otherwise.
struct FirmPenalty {
    double tau;
    double rho;

    FirmPenalty(double tau_, double rho_) : tau(tau_), rho(rho_)
    {
        detail::require(tau > 0.0 && std::isfinite(tau), ErrorCode::invalid_argument,
                        "firm penalty needs tau > 0");
        detail::require(rho > 0.0 && std::isfinite(rho), ErrorCode::invalid_argument,
                        "firm penalty needs rho > 0");
    }
};

/// τ|t|, the ρ → 0 limit of the firm penalty.
struct L1Penalty {
    double tau;

    explicit L1Penalty(double tau_) : tau(tau_)
    {
        detail::require(tau >= 0.0 && std::isfinite(tau), ErrorCode::invalid_argument,
                        "l1 penalty needs tau >= 0");
    }
};

/// g ≡ 0.
struct NullPenalty {};

inline double firm_eval(const FirmPenalty& p, double t)
{
    const double a = std::abs(t);
    if (a < p.tau / p.rho) return p.tau * a - 0.5 * p.rho * t * t;
    return p.tau * p.tau / (2.0 * p.rho);
}

/// Firm threshold: prox of P_{τ,ρ} with step α. Requires αρ < 1.
inline double firm_prox(const FirmPenalty& p, double t, double alpha)
{
    detail::require(alpha > 0.0, ErrorCode::invalid_argument, "prox step must be positive");
    detail::require(alpha * p.rho < 1.0, ErrorCode::step_too_large,
                    "firm prox needs alpha*rho < 1 (alpha = " + std::to_string(alpha) +
                        ", rho = " + std::to_string(p.rho) + ")");
    const double a = std::abs(t);
    if (a < alpha * p.tau) return 0.0;
    if (a < p.tau / p.rho) return std::copysign((a - alpha * p.tau) / (1.0 - alpha * p.rho), t);
    return t;
}

inline double soft_threshold(double t, double thresh)
{
    const double a = std::abs(t) - thresh;
    return a > 0.0 ? std::copysign(a, t) : 0.0;
}

class Penalty {
public:
    using Kind = std::variant<NullPenalty, L1Penalty, FirmPenalty>;

    Penalty() = default;
    Penalty(NullPenalty p) : kind_(p) {}
    Penalty(L1Penalty p) : kind_(p) {}
    Penalty(FirmPenalty p) : kind_(p) {}

    const Kind& kind() const noexcept { return kind_; }

    /// Weak-convexity modulus ρ.
    double modulus() const
    {
        return std::visit(
            [](const auto& p) -> double {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, FirmPenalty>) return p.rho;
                else return 0.0;
            },
            kind_);
    }

    double value(double t) const
    {
        return std::visit(
            [t](const auto& p) -> double {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, FirmPenalty>) return firm_eval(p, t);
                else if constexpr (std::is_same_v<T, L1Penalty>) return p.tau * std::abs(t);
                else return 0.0;
            },
            kind_);
    }

    double prox(double t, double alpha) const
    {
        return std::visit(
            [t, alpha](const auto& p) -> double {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, FirmPenalty>) return firm_prox(p, t, alpha);
                else if constexpr (std::is_same_v<T, L1Penalty>) return soft_threshold(t, alpha * p.tau);
                else return t;
            },
            kind_);
    }

    double value(const Vector& x) const
    {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) sum += value(x[i]);
        return sum;
    }

private:
    Kind kind_{NullPenalty{}};
};

/// Coordinatewise prox J_{αg}(x). Throws step_too_large unless αρ < 1.
inline Vector prox_vector(const Penalty& g, const Vector& x, double alpha)
{
    detail::require(alpha > 0.0, ErrorCode::invalid_argument, "prox step must be positive");
    detail::require(alpha * g.modulus() < 1.0, ErrorCode::step_too_large,
                    "penalty prox needs alpha*rho < 1");
    Vector z(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) z[i] = g.prox(x[i], alpha);
    return z;
}

/// K1(x) = J_{β₁g}(β₁x/α) with β₁ = α/(1 + αρ); the prox of g + (ρ/2)‖·‖²
/// with step α. Valid for every α > 0 since β₁ρ < 1.
inline Vector shifted_prox_K1(const Penalty& g, const Vector& x, double alpha)
{
    detail::require(alpha > 0.0, ErrorCode::invalid_argument, "prox step must be positive");
    const double beta1 = alpha / (1.0 + alpha * g.modulus());
    return prox_vector(g, (beta1 / alpha) * x, beta1);
}

} // namespace wcdr
