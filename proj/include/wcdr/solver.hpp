#pragma once

// Douglas-Rachford iterations for min f(x) + g(x) with f strongly convex and
// g weakly convex, plus the ISTA baseline.
//
// Every DR variant is the relaxed double reflection
//
//     z ← (1 − λ) z + λ (2·outer − I)(2·inner − I) z
//
// and its primal estimate is inner(z):
//
//     variant       inner          outer          step gate
//     dr-main-fg    J_{αg}         J_{αf}         α ≤ 1/√(σρ)
//     dr-main-gf    J_{αf}         J_{αg}         α ≤ 1/√(σρ)
//     dr-shift-fg   K1             K2             αρ < 1
//     dr-shift-gf   K2             K1             αρ < 1
//
// with K1 the prox of g + (ρ/2)‖·‖² and K2 the prox of f − (ρ/2)‖·‖².

#include <wcdr/error.hpp>
#include <wcdr/linalg.hpp>
#include <wcdr/penalty.hpp>
#include <wcdr/smooth.hpp>

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wcdr {

enum class Variant { dr_main_fg, dr_main_gf, dr_shift_fg, dr_shift_gf, ista };

inline constexpr Variant all_dr_variants[] = {Variant::dr_main_fg, Variant::dr_main_gf,
                                              Variant::dr_shift_fg, Variant::dr_shift_gf};

inline std::string_view to_string(Variant v) noexcept
{
    switch (v) {
    case Variant::dr_main_fg: return "dr-main-fg";
    case Variant::dr_main_gf: return "dr-main-gf";
    case Variant::dr_shift_fg: return "dr-shift-fg";
    case Variant::dr_shift_gf: return "dr-shift-gf";
    case Variant::ista: return "ista";
    }
    return "unknown";
}

inline std::optional<Variant> parse_variant(std::string_view name) noexcept
{
    for (auto v : {Variant::dr_main_fg, Variant::dr_main_gf, Variant::dr_shift_fg,
                   Variant::dr_shift_gf, Variant::ista})
        if (to_string(v) == name) return v;
    return std::nullopt;
}

inline bool is_shifted(Variant v) noexcept
{
    return v == Variant::dr_shift_fg || v == Variant::dr_shift_gf;
}

inline bool is_main(Variant v) noexcept
{
    return v == Variant::dr_main_fg || v == Variant::dr_main_gf;
}

/// h = f + g.
template <SmoothTerm F>
struct Problem {
    F f;
    Penalty g;

    double cost(const Vector& x) const { return f.value(x) + g.value(x); }
    double rho() const { return g.modulus(); }
    Eigen::Index dimension() const { return f.dimension(); }
};

template <SmoothTerm F>
Problem(F, Penalty) -> Problem<F>;

// ---------------------------------------------------------------------------
// Step-size gates

struct StepGate {
    bool pass;
    double bound; // +inf when unbounded
};

/// Direct iterations: α ≤ 1/√(σρ), inclusive; unbounded when ρ = 0.
inline StepGate validate_step_main(double alpha, double sigma, double rho)
{
    detail::require(rho >= 0.0 && sigma >= rho, ErrorCode::invalid_argument,
                    "step gate needs sigma >= rho >= 0");
    if (rho == 0.0) return {alpha > 0.0, std::numeric_limits<double>::infinity()};
    const double bound = 1.0 / std::sqrt(sigma * rho);
    return {alpha > 0.0 && alpha <= bound, bound};
}

/// Shifted iterations: αρ < 1, strict.
inline StepGate validate_step_shift(double alpha, double rho)
{
    detail::require(rho >= 0.0, ErrorCode::invalid_argument, "step gate needs rho >= 0");
    if (rho == 0.0) return {alpha > 0.0, std::numeric_limits<double>::infinity()};
    return {alpha > 0.0 && alpha * rho < 1.0, 1.0 / rho};
}

/// ISTA: α ≤ 1/σ.
inline StepGate validate_step_ista(double alpha, double sigma)
{
    const double bound = 1.0 / sigma;
    return {alpha > 0.0 && alpha <= bound, bound};
}

/// The step used when none is given: `fraction` of the variant's bound.
/// Unbounded gates (ρ = 0) fall back to 1/√(σs) for the direct iterations
/// and 1/s for the shifted ones; ISTA uses 1/σ.
inline double default_alpha(Variant v, double s, double sigma, double rho, double fraction = 0.99)
{
    switch (v) {
    case Variant::dr_main_fg:
    case Variant::dr_main_gf:
        return rho > 0.0 ? fraction / std::sqrt(sigma * rho) : 1.0 / std::sqrt(sigma * s);
    case Variant::dr_shift_fg:
    case Variant::dr_shift_gf: return rho > 0.0 ? fraction / rho : 1.0 / s;
    case Variant::ista: return 1.0 / sigma;
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Building blocks

/// 2·prox(z) − z.
template <class Prox>
Vector reflect(Prox&& prox_op, const Vector& z, double alpha)
{
    return 2.0 * prox_op(z, alpha) - z;
}

/// One relaxed double-reflection map for a fixed (variant, α, λ).
/// Owns a copy of the problem; stepping is const and thread-safe.
template <SmoothTerm F>
class DouglasRachford {
public:
    /// λ = 1 is only accepted with peaceman_rachford = true, which exposes the
    /// unrelaxed composition for contraction analysis.
    DouglasRachford(Problem<F> problem, Variant variant, double alpha, double lambda = 0.5,
                    bool peaceman_rachford = false)
        : problem_(std::move(problem)), variant_(variant), alpha_(alpha), lambda_(lambda)
    {
        detail::require(variant != Variant::ista, ErrorCode::invalid_argument,
                        "ISTA is not a Douglas-Rachford variant");
        const bool lambda_ok =
            (lambda > 0.0 && lambda < 1.0) || (peaceman_rachford && lambda == 1.0);
        detail::require(lambda_ok, ErrorCode::invalid_argument,
                        "relaxation lambda must lie in (0, 1)");
        const double rho = problem_.rho();
        if (is_main(variant)) {
            if constexpr (DifferentiableTerm<F>) {
                const auto gate = validate_step_main(alpha, problem_.f.lipschitz(), rho);
                detail::require(gate.pass, ErrorCode::invalid_step,
                                std::string(to_string(variant)) + " needs alpha <= " +
                                    std::to_string(gate.bound) + ", got " + std::to_string(alpha));
            } else {
                throw Error(ErrorCode::invalid_argument,
                            std::string(to_string(variant)) + " needs a differentiable f");
            }
        } else {
            const auto gate = validate_step_shift(alpha, rho);
            detail::require(gate.pass, ErrorCode::invalid_step,
                            std::string(to_string(variant)) + " needs alpha < " +
                                std::to_string(gate.bound) + ", got " + std::to_string(alpha));
        }
    }

    const Problem<F>& problem() const noexcept { return problem_; }
    Variant variant() const noexcept { return variant_; }
    double alpha() const noexcept { return alpha_; }
    double lambda() const noexcept { return lambda_; }

    Vector prox_f(const Vector& x) const
    {
        return is_shifted(variant_) ? problem_.f.shifted_prox(x, alpha_, problem_.rho())
                                    : problem_.f.prox(x, alpha_);
    }

    Vector prox_g(const Vector& x) const
    {
        return is_shifted(variant_) ? shifted_prox_K1(problem_.g, x, alpha_)
                                    : prox_vector(problem_.g, x, alpha_);
    }

    Vector inner(const Vector& z) const { return g_first() ? prox_g(z) : prox_f(z); }
    Vector outer(const Vector& z) const { return g_first() ? prox_f(z) : prox_g(z); }

    /// Primal estimate carried by the driver point z.
    Vector primal(const Vector& z) const { return inner(z); }

    /// Unrelaxed composition (2·outer − I)(2·inner − I).
    Vector reflected(const Vector& z) const { return reflected_from(z, inner(z)); }

    /// Same, reusing x = inner(z).
    Vector reflected_from(const Vector& z, const Vector& x) const
    {
        const Vector r = 2.0 * x - z;
        return 2.0 * outer(r) - r;
    }

    Vector step(const Vector& z) const { return step_from(z, inner(z)); }

    Vector step_from(const Vector& z, const Vector& x) const
    {
        return (1.0 - lambda_) * z + lambda_ * reflected_from(z, x);
    }

private:
    bool g_first() const noexcept
    {
        return variant_ == Variant::dr_main_fg || variant_ == Variant::dr_shift_fg;
    }

    Problem<F> problem_;
    Variant variant_;
    double alpha_;
    double lambda_;
};

/// x' = J_{αg}(x − α∇f(x)).
template <DifferentiableTerm F>
Vector ista_step(const Problem<F>& problem, const Vector& x, double alpha)
{
    const auto gate = validate_step_ista(alpha, problem.f.lipschitz());
    detail::require(gate.pass, ErrorCode::invalid_step,
                    "ISTA needs alpha <= 1/sigma = " + std::to_string(gate.bound));
    return prox_vector(problem.g, x - alpha * problem.f.gradient(x), alpha);
}

/// Step used to audit fixed-point residuals: 1/σ, pulled back to 0.5/ρ in the
/// degenerate case ρ ≥ σ where 1/σ would leave the prox undefined.
template <DifferentiableTerm F>
double audit_step(const Problem<F>& problem)
{
    const double a = 1.0 / problem.f.lipschitz();
    const double rho = problem.rho();
    return a * rho < 1.0 ? a : 0.5 / rho;
}

/// ‖x − J_{αg}(x − α∇f(x))‖ at the audit step; zero exactly at minimizers.
template <DifferentiableTerm F>
double fixed_point_residual(const Problem<F>& problem, const Vector& x)
{
    const double a = audit_step(problem);
    return (x - prox_vector(problem.g, x - a * problem.f.gradient(x), a)).norm();
}

// ---------------------------------------------------------------------------
// Driver

struct SolverConfig {
    Variant variant = Variant::dr_main_fg;
    double alpha = 0.0;
    double lambda = 0.5;
    int max_iters = 1000;
    double tol = 0.0; // stop once ‖z^{n+1} − z^n‖ ≤ tol
    std::optional<Vector> reference;
    std::optional<Vector> initial; // z⁰; zero when absent
};

struct TraceRow {
    int iter;
    double cost;
    double step_norm;   // 0 on the initial row
    double fp_residual; // NaN when f has no gradient
    double dist_to_ref; // NaN without a reference
};

struct IterationTrace {
    Variant variant{};
    double alpha = 0.0;
    double lambda = 0.0;
    std::vector<TraceRow> rows;
    Vector x; // final primal point
    Vector z; // final driver point (equals x for ISTA)
    bool converged = false;

    int iterations() const { return rows.empty() ? 0 : rows.back().iter; }
    const TraceRow& last() const { return rows.back(); }

    /// First iteration with dist_to_ref ≤ threshold, if any.
    std::optional<int> iterations_to(double threshold) const
    {
        for (const auto& r : rows)
            if (r.dist_to_ref <= threshold) return r.iter;
        return std::nullopt;
    }
};

namespace detail {

template <SmoothTerm F>
TraceRow make_row(const Problem<F>& problem, const SolverConfig& cfg, int iter, const Vector& x,
                  double step_norm)
{
    TraceRow row{iter, problem.cost(x), step_norm, std::numeric_limits<double>::quiet_NaN(),
                 std::numeric_limits<double>::quiet_NaN()};
    if constexpr (DifferentiableTerm<F>) row.fp_residual = fixed_point_residual(problem, x);
    if (cfg.reference) row.dist_to_ref = (x - *cfg.reference).norm();
    return row;
}

inline void check_finite(const Vector& v, int iter, std::string_view what)
{
    if (!v.allFinite())
        throw Error(ErrorCode::divergence, "non-finite " + std::string(what) + " at iteration " +
                                               std::to_string(iter));
}

} // namespace detail

/// Iterate until ‖z^{n+1} − z^n‖ ≤ tol or max_iters, recording one row per
/// iterate (row 0 is the starting point).
template <SmoothTerm F>
IterationTrace run(const Problem<F>& problem, const SolverConfig& cfg)
{
    detail::require(cfg.max_iters >= 0, ErrorCode::invalid_argument, "max_iters must be >= 0");
    detail::require(cfg.tol >= 0.0, ErrorCode::invalid_argument, "tol must be >= 0");
    if (cfg.reference)
        detail::require(cfg.reference->size() == problem.dimension(),
                        ErrorCode::dimension_mismatch, "reference has wrong length");

    IterationTrace trace;
    trace.variant = cfg.variant;
    trace.alpha = cfg.alpha;
    trace.lambda = cfg.variant == Variant::ista ? 1.0 : cfg.lambda;

    Vector z = cfg.initial ? *cfg.initial : Vector::Zero(problem.dimension());
    detail::require(z.size() == problem.dimension(), ErrorCode::dimension_mismatch,
                    "initial point has wrong length");

    if (cfg.variant == Variant::ista) {
        if constexpr (DifferentiableTerm<F>) {
            const auto gate = validate_step_ista(cfg.alpha, problem.f.lipschitz());
            detail::require(gate.pass, ErrorCode::invalid_step,
                            "ISTA needs alpha <= 1/sigma = " + std::to_string(gate.bound));
            trace.rows.push_back(detail::make_row(problem, cfg, 0, z, 0.0));
            for (int n = 1; n <= cfg.max_iters; ++n) {
                Vector next = ista_step(problem, z, cfg.alpha);
                detail::check_finite(next, n, "iterate");
                const double step = (next - z).norm();
                z = std::move(next);
                trace.rows.push_back(detail::make_row(problem, cfg, n, z, step));
                if (step <= cfg.tol) {
                    trace.converged = true;
                    break;
                }
            }
            trace.x = z;
            trace.z = z;
            return trace;
        } else {
            throw Error(ErrorCode::invalid_argument, "ISTA needs a differentiable f");
        }
    }

    const DouglasRachford<F> dr(problem, cfg.variant, cfg.alpha, cfg.lambda);
    Vector x = dr.primal(z);
    detail::check_finite(x, 0, "primal point");
    trace.rows.push_back(detail::make_row(problem, cfg, 0, x, 0.0));
    for (int n = 1; n <= cfg.max_iters; ++n) {
        Vector next = dr.step_from(z, x);
        detail::check_finite(next, n, "driver point");
        const double step = (next - z).norm();
        z = std::move(next);
        x = dr.primal(z);
        detail::check_finite(x, n, "primal point");
        trace.rows.push_back(detail::make_row(problem, cfg, n, x, step));
        if (step <= cfg.tol) {
            trace.converged = true;
            break;
        }
    }
    trace.x = std::move(x);
    trace.z = std::move(z);
    return trace;
}

} // namespace wcdr
