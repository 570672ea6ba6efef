// wcdr command-line driver: experiments, single solves, rate tables and
// empirical certification of the operator bounds.

#include <wcdr/analysis.hpp>
#include <wcdr/experiment.hpp>
#include <wcdr/io.hpp>
#include <wcdr/solver.hpp>

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace wcdr;

namespace {

std::ofstream open_output(const fs::path& path)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::invalid_argument, "cannot write " + path.string());
    return out;
}

ExperimentSpec named_spec(const std::string& name)
{
    if (name == "exp1") return exp1_spec();
    if (name == "exp2") return exp2_spec();
    throw Error(ErrorCode::invalid_argument, "unknown experiment '" + name + "' (expected exp1 or exp2)");
}

struct ExperimentArgs {
    int seeds = 20;
    double alpha_frac = 0.99;
    double lambda = 0.5;
    int iters = 3000;
    int ref_iters = 10000;
    std::uint64_t master_seed = 1;
    std::string out_dir;
};

int run_experiment_command(const std::string& name, const ExperimentArgs& a)
{
    auto spec = named_spec(name);
    spec.n_seeds = a.seeds;
    spec.alpha_fraction = a.alpha_frac;
    spec.lambda = a.lambda;
    spec.max_iters = a.iters;
    spec.reference_iters = a.ref_iters;
    spec.master_seed = a.master_seed;
    const auto report = run_experiment(spec);

    std::printf("%s: filter decay %.6f, sigma/s %.4f (target %.2f)\n", name.c_str(), report.design.decay,
                report.design.ratio, spec.target_ratio);
    std::printf("%-12s %8s %18s\n", "variant", "reached", "median iterations");
    for (const auto& vs : report.summary) {
        const std::string med = vs.median_iterations ? format_double(*vs.median_iterations) : "-";
        std::printf("%-12s %5d/%-2d %18s\n", std::string(to_string(vs.variant)).c_str(), vs.reached, spec.n_seeds,
                    med.c_str());
    }
    std::printf("dr-main-fg faster than dr-shift-fg on %d/%d seeds\n", report.main_faster_than_shift, spec.n_seeds);
    std::printf("all DR variants faster than ISTA on %d/%d seeds\n", report.dr_faster_than_ista, spec.n_seeds);
    for (const auto& sr : report.seeds)
        if (sr.error) std::fprintf(stderr, "seed %llu failed: %s\n", static_cast<unsigned long long>(sr.seed), sr.error->c_str());

    if (!a.out_dir.empty()) {
        const fs::path dir(a.out_dir);
        open_output(dir / "report.json") << report_to_json(report).dump(2) << '\n';
        for (const auto& sr : report.seeds)
            for (const auto& r : sr.results) {
                auto out = open_output(dir / ("seed" + std::to_string(sr.seed) + "_" + std::string(to_string(r.variant)) + ".csv"));
                write_trace_csv(out, r.trace);
            }
        std::printf("wrote %s\n", (dir / "report.json").string().c_str());
    }
    for (const auto& sr : report.seeds)
        if (sr.error) return 1;
    return 0;
}

struct SolveArgs {
    std::string instance;
    std::string variant = "dr-main-fg";
    std::optional<double> alpha;
    double lambda = 0.5;
    int iters = 1000;
    double tol = 0.0;
    int ref_iters = 10000;
    std::string trace;
    std::string json;
};

int run_solve(const SolveArgs& a)
{
    std::ifstream in(a.instance);
    if (!in) throw Error(ErrorCode::invalid_argument, "cannot read " + a.instance);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::invalid_argument, a.instance + ": " + e.what());
    }
    const auto inst = instance_from_json(j);
    const auto problem = inst.problem();
    const auto variant = parse_variant(a.variant);
    if (!variant) throw Error(ErrorCode::invalid_argument, "unknown variant '" + a.variant + "'");

    SolverConfig cfg;
    cfg.variant = *variant;
    cfg.alpha = a.alpha ? *a.alpha
                        : default_alpha(*variant, problem.f.strong_convexity(), problem.f.lipschitz(), problem.rho());
    cfg.lambda = a.lambda;
    cfg.max_iters = a.iters;
    cfg.tol = a.tol;
    if (a.ref_iters > 0) cfg.reference = ista_reference(problem, a.ref_iters);
    const auto trace = run(problem, cfg);

    const auto& last = trace.last();
    std::printf("%s alpha=%s lambda=%s iterations=%d converged=%s\n", std::string(to_string(cfg.variant)).c_str(),
                format_double(cfg.alpha).c_str(), format_double(trace.lambda).c_str(), trace.iterations(),
                trace.converged ? "yes" : "no");
    std::printf("cost=%s fp_residual=%s dist_to_ref=%s\n", format_double(last.cost).c_str(),
                format_double(last.fp_residual).c_str(), format_double(last.dist_to_ref).c_str());
    if (!a.trace.empty()) {
        auto out = open_output(a.trace);
        write_trace_csv(out, trace);
    }
    if (!a.json.empty()) open_output(a.json) << trace_to_json(trace, cfg).dump(2) << '\n';
    return 0;
}

struct RatesArgs {
    double s = 0.0;
    double sigma = 0.0;
    double rho = 0.0;
    int points = 20;
    std::optional<double> alpha_max;
    std::string out;
};

int run_rates(const RatesArgs& a)
{
    detail::require(a.s > 0 && a.sigma >= a.s, ErrorCode::invalid_argument, "need 0 < s <= sigma");
    detail::require(a.rho >= 0, ErrorCode::invalid_argument, "rho must be >= 0");
    detail::require(a.points >= 1, ErrorCode::invalid_argument, "points must be >= 1");
    const double top = a.alpha_max ? *a.alpha_max : (a.rho > 0 ? 1.0 / a.rho : 2.0 / a.s);
    std::vector<double> alphas;
    for (int i = 1; i <= a.points; ++i) alphas.push_back(top * i / a.points);
    if (a.out.empty()) {
        write_rate_table(std::cout, a.s, a.sigma, a.rho, alphas);
    } else {
        auto out = open_output(a.out);
        write_rate_table(out, a.s, a.sigma, a.rho, alphas);
    }
    return 0;
}

struct CertifyArgs {
    std::string experiment = "exp2";
    std::uint64_t seed = 0;
    int pairs = 1000;
};

// Empirical Lipschitz estimates against their closed-form bounds.
int run_certify(const CertifyArgs& a)
{
    const auto inst = build_instance(named_spec(a.experiment), a.seed);
    const auto p = inst.problem();
    const double s = p.f.strong_convexity(), sigma = p.f.lipschitz(), rho = p.rho();
    const auto n = p.dimension();
    const double radius = 3.0 * inst.tau / rho;
    const IndependentPairSampler wide(n, radius);
    const LocalPairSampler local(n, radius, 1e-2 * inst.tau);
    const CoordinatePerturbationSampler kink(n, radius, 1e-3 * inst.tau);

    int violations = 0;
    const auto report = [&](const std::string& what, double est, double bound) {
        const bool ok = est <= bound + 1e-9;
        violations += ok ? 0 : 1;
        std::printf("%-28s empirical %.9f bound %.9f %s\n", what.c_str(), est, bound, ok ? "ok" : "VIOLATED");
    };
    const auto estimate = [&](auto&& op) {
        return std::max({empirical_lipschitz(op, wide, a.pairs, 1), empirical_lipschitz(op, local, a.pairs, 2),
                         empirical_lipschitz(op, kink, a.pairs, 3)});
    };

    const double a_t = 1.0 / std::sqrt(sigma * s);
    const double a_v = 1.0 / s;
    std::printf("%s seed %llu: s=%.6g sigma=%.6g rho=%.6g tau=%.6g\n", a.experiment.c_str(),
                static_cast<unsigned long long>(a.seed), s, sigma, rho, inst.tau);
    report("U_g at 1/sqrt(sigma s)", estimate([&](const Vector& x) { return reflect_penalty(p.g, x, a_t); }),
           bound_Ug(a_t, rho));
    report("U_f at 1/sqrt(sigma s)", estimate([&](const Vector& x) { return reflect_smooth(p.f, x, a_t); }),
           bound_Uf(a_t, s, sigma));
    const double a_main = 1.0 / std::sqrt(sigma * rho);
    for (auto v : {Variant::dr_main_fg, Variant::dr_main_gf}) {
        const DouglasRachford<QuadraticTerm> dr(p, v, a_main, 1.0, true);
        report(std::string(to_string(v)) + " composition", estimate([&](const Vector& z) { return dr.reflected(z); }), 1.0);
    }
    const auto t_op = peaceman_rachford_T(p, a_t);
    report("T at 1/sqrt(sigma s)", estimate([&](const Vector& z) { return t_op.reflected(z); }), rate_T(a_t, s, rho, sigma));
    const auto v_op = peaceman_rachford_V(p, a_v);
    report("V at 1/s", estimate([&](const Vector& z) { return v_op.reflected(z); }), rate_V(a_v, s, rho, sigma));
    std::printf("%d violation(s)\n", violations);
    return violations == 0 ? 0 : 1;
}

struct InstanceArgs {
    std::string experiment = "exp1";
    std::uint64_t seed = 0;
    std::uint64_t master_seed = 1;
    std::string out;
};

int run_instance(const InstanceArgs& a)
{
    auto spec = named_spec(a.experiment);
    spec.master_seed = a.master_seed;
    const auto inst = build_instance(spec, a.seed);
    const auto text = instance_to_json(inst).dump(2);
    if (a.out.empty())
        std::cout << text << '\n';
    else
        open_output(a.out) << text << '\n';
    return 0;
}

void add_experiment_options(CLI::App* cmd, ExperimentArgs& a)
{
    cmd->add_option("--seeds", a.seeds, "number of seeds")->check(CLI::PositiveNumber);
    cmd->add_option("--alpha-frac", a.alpha_frac, "step as a fraction of each variant's bound")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--lambda", a.lambda, "relaxation in (0, 1)");
    cmd->add_option("--iters", a.iters, "iterations per solver")->check(CLI::NonNegativeNumber);
    cmd->add_option("--ref-iters", a.ref_iters, "ISTA iterations for the reference")->check(CLI::NonNegativeNumber);
    cmd->add_option("--master-seed", a.master_seed, "master seed");
    cmd->add_option("--out-dir", a.out_dir, "directory for report.json and per-seed trace CSVs");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Douglas-Rachford splitting for strongly convex plus weakly convex problems"};
    app.require_subcommand(1);

    ExperimentArgs e1, e2;
    auto* exp1 = app.add_subcommand("exp1", "sparse deconvolution, sigma/s = 15.96, rho = s");
    add_experiment_options(exp1, e1);
    auto* exp2 = app.add_subcommand("exp2", "sparse deconvolution, sigma/s = 5.44, rho = s/2");
    add_experiment_options(exp2, e2);

    SolveArgs sa;
    auto* solve = app.add_subcommand("solve", "solve one instance and write its trace");
    solve->add_option("--instance", sa.instance, "instance JSON")->required();
    solve->add_option("--variant", sa.variant, "dr-main-fg, dr-main-gf, dr-shift-fg, dr-shift-gf or ista");
    solve->add_option("--alpha", sa.alpha, "step size (default: 0.99 of the variant's bound)");
    solve->add_option("--lambda", sa.lambda, "relaxation in (0, 1)");
    solve->add_option("--iters", sa.iters, "maximum iterations")->check(CLI::NonNegativeNumber);
    solve->add_option("--tol", sa.tol, "stop once the driver step is at most tol")->check(CLI::NonNegativeNumber);
    solve->add_option("--ref-iters", sa.ref_iters, "ISTA iterations for dist_to_ref (0 disables)")
        ->check(CLI::NonNegativeNumber);
    solve->add_option("--trace", sa.trace, "trace CSV path");
    solve->add_option("--json", sa.json, "trace summary JSON path");

    RatesArgs ra;
    auto* rates = app.add_subcommand("rates", "tabulate bounds and rates over a step grid");
    rates->add_option("--s", ra.s, "strong convexity of f")->required();
    rates->add_option("--sigma", ra.sigma, "Lipschitz constant of the gradient of f")->required();
    rates->add_option("--rho", ra.rho, "weak convexity of g")->required();
    rates->add_option("--points", ra.points, "grid points");
    rates->add_option("--alpha-max", ra.alpha_max, "largest step (default 1/rho, or 2/s when rho = 0)");
    rates->add_option("--out", ra.out, "CSV path (default stdout)");

    CertifyArgs ca;
    auto* certify = app.add_subcommand("certify", "check empirical Lipschitz constants against the bounds");
    certify->add_option("--experiment", ca.experiment, "exp1 or exp2");
    certify->add_option("--seed", ca.seed, "instance seed");
    certify->add_option("--pairs", ca.pairs, "pairs per sampler")->check(CLI::PositiveNumber);

    InstanceArgs ia;
    auto* instance = app.add_subcommand("instance", "write an experiment instance as JSON");
    instance->add_option("--experiment", ia.experiment, "exp1 or exp2");
    instance->add_option("--seed", ia.seed, "instance seed");
    instance->add_option("--master-seed", ia.master_seed, "master seed");
    instance->add_option("--out", ia.out, "JSON path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*exp1) return run_experiment_command("exp1", e1);
        if (*exp2) return run_experiment_command("exp2", e2);
        if (*solve) return run_solve(sa);
        if (*rates) return run_rates(ra);
        if (*certify) return run_certify(ca);
        if (*instance) return run_instance(ia);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
