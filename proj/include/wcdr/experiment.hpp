#pragma once

// Sparse deconvolution experiments: y = Hx + u with H a tall convolution
// matrix, x sparse, u white Gaussian noise at a fixed SNR, and the estimate
//
//     argmin_t ½‖y − Ht‖² + Σ_i P_{τ,ρ}(t_i),   τ = 3ρ·std(u).

#include <wcdr/error.hpp>
#include <wcdr/linalg.hpp>
#include <wcdr/penalty.hpp>
#include <wcdr/smooth.hpp>
#include <wcdr/solver.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wcdr {

using ExperimentRng = std::mt19937_64;

/// k nonzeros at uniformly chosen positions, amplitudes ±U[1, 2].
inline Vector generate_sparse_signal(Eigen::Index n, Eigen::Index k, ExperimentRng& rng)
{
    detail::require(n > 0, ErrorCode::invalid_argument, "signal length must be positive");
    detail::require(k >= 0 && k <= n, ErrorCode::invalid_argument,
                    "sparsity " + std::to_string(k) + " out of range for length " + std::to_string(n));
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    std::uniform_real_distribution<double> magnitude(1.0, 2.0);
    std::bernoulli_distribution negative(0.5);
    Vector x = Vector::Zero(n);
    for (Eigen::Index i = 0; i < k; ++i) {
        const double m = magnitude(rng);
        x[idx[static_cast<std::size_t>(i)]] = negative(rng) ? -m : m;
    }
    return x;
}

struct NoisyObservation {
    Vector y;
    double noise_std; // RMS of the added noise
};

/// Adds white Gaussian noise whose power is exactly mean(clean²)/10^(snr/10).
/// The Gaussian draw is rescaled to that power, so the realized SNR is exact
/// and noise_std is both the generating and the realized RMS value.
inline NoisyObservation add_noise_snr(const Vector& clean, double snr_db, ExperimentRng& rng)
{
    detail::require(clean.size() > 0, ErrorCode::invalid_argument, "empty signal");
    const double signal_power = clean.squaredNorm() / static_cast<double>(clean.size());
    detail::require(signal_power > 0.0, ErrorCode::invalid_argument,
                    "cannot set an SNR for a zero signal");
    const double noise_power = signal_power / std::pow(10.0, snr_db / 10.0);
    std::normal_distribution<double> normal;
    Vector u(clean.size());
    for (auto& e : u) e = normal(rng);
    const double drawn_power = u.squaredNorm() / static_cast<double>(u.size());
    u *= std::sqrt(noise_power / drawn_power);
    return {clean + u, std::sqrt(noise_power)};
}

inline double snr_db(const Vector& clean, const Vector& noise)
{
    return 10.0 * std::log10(clean.squaredNorm() / noise.squaredNorm());
}

// ---------------------------------------------------------------------------
// Filter design

/// Taps (1, a, a², …, a^{L−1}).
inline std::vector<double> geometric_filter(double a, std::size_t length)
{
    std::vector<double> taps(length);
    double v = 1.0;
    for (auto& t : taps) {
        t = v;
        v *= a;
    }
    return taps;
}

/// σ/s of the Gram matrix of the tall convolution operator built from taps.
inline double condition_ratio(std::span<const double> taps, std::size_t signal_len)
{
    const LinearMap map(convolution_matrix(taps, signal_len));
    const auto ext = gram_extreme_eigenvalues(map);
    return ext.sigma / ext.s;
}

struct FilterDesign {
    std::vector<double> taps;
    double decay;  // a
    double ratio;  // achieved σ/s
};

/// Finds a in (0, 0.95] by bisection so that the geometric filter of the given
/// length reaches σ/s = target within relative tolerance tol.
inline FilterDesign design_filter(double target_ratio, std::size_t length, std::size_t signal_len,
                                  double tol = 0.02)
{
    detail::require(target_ratio > 1.0, ErrorCode::invalid_argument, "target ratio must exceed 1");
    detail::require(length >= 1, ErrorCode::invalid_argument, "filter length must be positive");
    constexpr double a_max = 0.95;
    const auto ratio_at = [&](double a) { return condition_ratio(geometric_filter(a, length), signal_len); };

    double lo = 0.0;
    double hi = a_max;
    const double r_hi = ratio_at(hi);
    if (r_hi < target_ratio * (1.0 - tol))
        throw Error(ErrorCode::design_failure,
                    "target ratio " + std::to_string(target_ratio) + " unreachable: family spans [1, " +
                        std::to_string(r_hi) + "] for length " + std::to_string(length));

    // Bisect well inside the tolerance so the achieved ratio is not at its edge.
    double a = hi;
    double r = r_hi;
    for (int it = 0; it < 200; ++it) {
        a = 0.5 * (lo + hi);
        r = ratio_at(a);
        if (std::abs(r / target_ratio - 1.0) <= 1e-3 * tol) break;
        (r < target_ratio ? lo : hi) = a;
    }
    if (std::abs(r / target_ratio - 1.0) > tol)
        throw Error(ErrorCode::design_failure, "bisection stalled at ratio " + std::to_string(r));
    return {geometric_filter(a, length), a, r};
}

// ---------------------------------------------------------------------------
// Instances

struct ExperimentSpec {
    std::string name = "exp";
    double target_ratio = 15.96;
    double rho_fraction = 1.0; // ρ = rho_fraction · s
    std::size_t signal_len = 90;
    std::size_t filter_len = 31;
    Eigen::Index sparsity = 9;
    double snr_db = 10.0;
    int n_seeds = 20;
    std::uint64_t master_seed = 1;
    std::vector<Variant> variants{Variant::dr_main_fg, Variant::dr_shift_fg};
    double alpha_fraction = 0.99;
    double lambda = 0.5;
    int max_iters = 3000;
    int reference_iters = 10000;
    double distance_threshold = 1e-6;
    double ratio_tol = 0.02;
};

/// σ/s = 15.96, ρ = s.
inline ExperimentSpec exp1_spec()
{
    ExperimentSpec spec;
    spec.name = "exp1";
    spec.target_ratio = 15.96;
    spec.rho_fraction = 1.0;
    return spec;
}

/// σ/s = 5.44, ρ = s/2.
inline ExperimentSpec exp2_spec()
{
    ExperimentSpec spec;
    spec.name = "exp2";
    spec.target_ratio = 5.44;
    spec.rho_fraction = 0.5;
    return spec;
}

struct ProblemInstance {
    std::vector<double> taps;
    std::size_t signal_len = 0;
    Vector ground_truth;
    Vector y;
    double noise_std = 0.0;
    double tau = 0.0;
    double rho = 0.0;
    std::uint64_t seed = 0;

    LinearMap map() const { return LinearMap(convolution_matrix(taps, signal_len)); }
    FirmPenalty penalty() const { return FirmPenalty(tau, rho); }
    Problem<QuadraticTerm> problem() const { return {QuadraticTerm(map(), y), Penalty(penalty())}; }
};

/// Per-seed RNG stream, independent of the order seeds are processed in.
inline ExperimentRng seed_stream(std::uint64_t master_seed, std::uint64_t seed)
{
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                      static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return ExperimentRng(seq);
}

/// Assembles an instance from a designed filter: sparse x, y = Hx + u at the
/// spec's SNR, ρ = rho_fraction·s and τ = 3ρ·std(u).
inline ProblemInstance build_instance(const ExperimentSpec& spec, std::uint64_t seed,
                                      const FilterDesign& design)
{
    auto rng = seed_stream(spec.master_seed, seed);
    ProblemInstance inst;
    inst.taps = design.taps;
    inst.signal_len = spec.signal_len;
    inst.seed = seed;
    const LinearMap map = inst.map();
    const auto ext = gram_extreme_eigenvalues(map);
    inst.ground_truth = generate_sparse_signal(static_cast<Eigen::Index>(spec.signal_len), spec.sparsity, rng);
    auto noisy = add_noise_snr(map.apply(inst.ground_truth), spec.snr_db, rng);
    inst.y = std::move(noisy.y);
    inst.noise_std = noisy.noise_std;
    inst.rho = spec.rho_fraction * ext.s;
    inst.tau = 3.0 * inst.rho * inst.noise_std;
    return inst;
}

inline ProblemInstance build_instance(const ExperimentSpec& spec, std::uint64_t seed)
{
    return build_instance(spec, seed, design_filter(spec.target_ratio, spec.filter_len, spec.signal_len, spec.ratio_tol));
}

// ---------------------------------------------------------------------------
// Runner

struct VariantResult {
    Variant variant{};
    double alpha = 0.0;
    std::optional<int> iterations_to_threshold;
    double final_cost = 0.0;
    double final_distance = 0.0;
    double final_fp_residual = 0.0;
    IterationTrace trace;
};

struct SeedResult {
    std::uint64_t seed = 0;
    double s = 0.0;
    double sigma = 0.0;
    double tau = 0.0;
    double rho = 0.0;
    double noise_std = 0.0;
    double reference_cost = 0.0;
    Vector reference;
    std::vector<VariantResult> results; // spec.variants, then ISTA
    std::optional<std::string> error;

    const VariantResult* find(Variant v) const
    {
        for (const auto& r : results)
            if (r.variant == v) return &r;
        return nullptr;
    }
};

struct VariantSummary {
    Variant variant{};
    int reached = 0; // seeds that hit the distance threshold
    std::optional<double> median_iterations;
};

struct ExperimentReport {
    ExperimentSpec spec;
    FilterDesign design;
    std::vector<SeedResult> seeds;
    std::vector<VariantSummary> summary;
    int main_faster_than_shift = 0; // seeds where dr-main-fg beat dr-shift-fg
    int dr_faster_than_ista = 0;    // seeds where every DR variant beat ISTA
};

namespace detail {

inline bool faster(const std::optional<int>& a, const std::optional<int>& b)
{
    if (!a) return false;
    if (!b) return true;
    return *a < *b;
}

inline std::optional<double> median(std::vector<int> v)
{
    if (v.empty()) return std::nullopt;
    std::sort(v.begin(), v.end());
    const auto m = v.size() / 2;
    return v.size() % 2 ? double(v[m]) : 0.5 * (v[m - 1] + v[m]);
}

} // namespace detail

/// ISTA from zero with α = 1/σ; the reference minimizer for distance tracking.
inline Vector ista_reference(const Problem<QuadraticTerm>& problem, int iterations)
{
    const double alpha = 1.0 / problem.f.lipschitz();
    Vector x = Vector::Zero(problem.dimension());
    for (int n = 0; n < iterations; ++n) x = ista_step(problem, x, alpha);
    return x;
}

inline SeedResult run_seed(const ExperimentSpec& spec, const FilterDesign& design, std::uint64_t seed)
{
    SeedResult out;
    out.seed = seed;
    try {
        const auto inst = build_instance(spec, seed, design);
        const auto problem = inst.problem();
        out.s = problem.f.strong_convexity();
        out.sigma = problem.f.lipschitz();
        out.tau = inst.tau;
        out.rho = inst.rho;
        out.noise_std = inst.noise_std;
        out.reference = ista_reference(problem, spec.reference_iters);
        out.reference_cost = problem.cost(out.reference);

        auto variants = spec.variants;
        variants.push_back(Variant::ista);
        for (auto v : variants) {
            SolverConfig cfg;
            cfg.variant = v;
            cfg.alpha = v == Variant::ista
                            ? 1.0 / out.sigma
                            : default_alpha(v, out.s, out.sigma, inst.rho, spec.alpha_fraction);
            cfg.lambda = spec.lambda;
            cfg.max_iters = spec.max_iters;
            cfg.reference = out.reference;
            VariantResult r;
            r.variant = v;
            r.alpha = cfg.alpha;
            r.trace = run(problem, cfg);
            r.iterations_to_threshold = r.trace.iterations_to(spec.distance_threshold);
            r.final_cost = r.trace.last().cost;
            r.final_distance = r.trace.last().dist_to_ref;
            r.final_fp_residual = r.trace.last().fp_residual;
            out.results.push_back(std::move(r));
        }
    } catch (const Error& e) {
        out.error = e.what();
    }
    return out;
}

/// Runs every seed, then aggregates iterations-to-threshold per variant.
inline ExperimentReport run_experiment(const ExperimentSpec& spec)
{
    detail::require(spec.n_seeds >= 1, ErrorCode::invalid_argument, "need at least one seed");
    ExperimentReport report;
    report.spec = spec;
    report.design = design_filter(spec.target_ratio, spec.filter_len, spec.signal_len, spec.ratio_tol);
    for (int i = 0; i < spec.n_seeds; ++i)
        report.seeds.push_back(run_seed(spec, report.design, static_cast<std::uint64_t>(i)));

    auto variants = spec.variants;
    variants.push_back(Variant::ista);
    for (auto v : variants) {
        std::vector<int> its;
        for (const auto& sr : report.seeds)
            if (const auto* r = sr.find(v); r && r->iterations_to_threshold)
                its.push_back(*r->iterations_to_threshold);
        report.summary.push_back({v, static_cast<int>(its.size()), detail::median(its)});
    }

    for (const auto& sr : report.seeds) {
        if (sr.error) continue;
        const auto* main = sr.find(Variant::dr_main_fg);
        const auto* shift = sr.find(Variant::dr_shift_fg);
        const auto* ista = sr.find(Variant::ista);
        if (main && shift && detail::faster(main->iterations_to_threshold, shift->iterations_to_threshold))
            ++report.main_faster_than_shift;
        bool all = true;
        for (const auto& r : sr.results)
            if (r.variant != Variant::ista && !detail::faster(r.iterations_to_threshold, ista->iterations_to_threshold))
                all = false;
        if (all) ++report.dr_faster_than_ista;
    }
    return report;
}

} // namespace wcdr
