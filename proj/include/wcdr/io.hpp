#pragma once

// CSV traces and JSON serialization of traces, instances and reports.
// Needs nlohmann/json (vendored as json.hpp).

#include <wcdr/experiment.hpp>
#include <wcdr/solver.hpp>

#include "json.hpp"

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace wcdr {

using Json = nlohmann::json;

/// %.17g; enough digits to round-trip a double.
inline std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline constexpr const char* trace_csv_header = "iter,cost,step_norm,fp_residual,dist_to_ref";

inline void write_trace_csv(std::ostream& out, const IterationTrace& trace)
{
    out << trace_csv_header << '\n';
    for (const auto& r : trace.rows)
        out << r.iter << ',' << format_double(r.cost) << ',' << format_double(r.step_norm) << ','
            << format_double(r.fp_residual) << ',' << format_double(r.dist_to_ref) << '\n';
}

inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

inline Vector to_vector(const Json& j)
{
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

namespace detail {

// JSON has no NaN; absent measurements become null.
inline Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

} // namespace detail

/// Config echo and final points.
inline Json trace_to_json(const IterationTrace& trace, const SolverConfig& cfg)
{
    Json j;
    j["config"] = {{"variant", std::string(to_string(cfg.variant))},
                   {"alpha", cfg.alpha},
                   {"lambda", trace.lambda},
                   {"max_iters", cfg.max_iters},
                   {"tol", cfg.tol},
                   {"has_reference", cfg.reference.has_value()}};
    j["iterations"] = trace.iterations();
    j["converged"] = trace.converged;
    if (!trace.rows.empty()) {
        const auto& last = trace.last();
        j["final"] = {{"cost", detail::number_or_null(last.cost)},
                      {"step_norm", detail::number_or_null(last.step_norm)},
                      {"fp_residual", detail::number_or_null(last.fp_residual)},
                      {"dist_to_ref", detail::number_or_null(last.dist_to_ref)}};
    }
    j["x"] = to_std(trace.x);
    j["z"] = to_std(trace.z);
    return j;
}

// ---------------------------------------------------------------------------
// Instances. nlohmann/json writes shortest round-trip doubles, so a dump and
// reload reproduces every value bit for bit.

inline Json instance_to_json(const ProblemInstance& inst)
{
    return {{"filter", inst.taps},
            {"signal_len", inst.signal_len},
            {"signal", to_std(inst.ground_truth)},
            {"noise_std", inst.noise_std},
            {"seed", inst.seed},
            {"penalty", {{"kind", "firm"}, {"tau", inst.tau}, {"rho", inst.rho}}},
            {"y", to_std(inst.y)}};
}

inline ProblemInstance instance_from_json(const Json& j)
{
    try {
        ProblemInstance inst;
        inst.taps = j.at("filter").get<std::vector<double>>();
        inst.ground_truth = to_vector(j.at("signal"));
        inst.signal_len = j.contains("signal_len") ? j.at("signal_len").get<std::size_t>()
                                                   : static_cast<std::size_t>(inst.ground_truth.size());
        inst.noise_std = j.at("noise_std").get<double>();
        inst.seed = j.at("seed").get<std::uint64_t>();
        inst.tau = j.at("penalty").at("tau").get<double>();
        inst.rho = j.at("penalty").at("rho").get<double>();
        inst.y = to_vector(j.at("y"));
        detail::require(inst.y.size() == static_cast<Eigen::Index>(inst.signal_len + inst.taps.size() - 1),
                        ErrorCode::dimension_mismatch, "instance y length does not match filter and signal");
        return inst;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::invalid_argument, std::string("malformed instance JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Reports

namespace detail {

inline Json optional_int(const std::optional<int>& v) { return v ? Json(*v) : Json(nullptr); }

} // namespace detail

inline Json report_to_json(const ExperimentReport& rep)
{
    Json j;
    const auto& sp = rep.spec;
    std::vector<std::string> variant_names;
    for (auto v : sp.variants) variant_names.emplace_back(to_string(v));
    j["spec"] = {{"name", sp.name},
                 {"target_ratio", sp.target_ratio},
                 {"rho_fraction", sp.rho_fraction},
                 {"signal_len", sp.signal_len},
                 {"filter_len", sp.filter_len},
                 {"sparsity", sp.sparsity},
                 {"snr_db", sp.snr_db},
                 {"n_seeds", sp.n_seeds},
                 {"master_seed", sp.master_seed},
                 {"variants", variant_names},
                 {"alpha_fraction", sp.alpha_fraction},
                 {"lambda", sp.lambda},
                 {"max_iters", sp.max_iters},
                 {"reference_iters", sp.reference_iters},
                 {"distance_threshold", sp.distance_threshold}};
    j["filter"] = {{"decay", rep.design.decay}, {"ratio", rep.design.ratio}, {"taps", rep.design.taps}};

    Json seeds = Json::array();
    for (const auto& sr : rep.seeds) {
        Json s = {{"seed", sr.seed}};
        if (sr.error) {
            s["error"] = *sr.error;
            seeds.push_back(std::move(s));
            continue;
        }
        s.update({{"s", sr.s},
                  {"sigma", sr.sigma},
                  {"tau", sr.tau},
                  {"rho", sr.rho},
                  {"noise_std", sr.noise_std},
                  {"reference_cost", sr.reference_cost}});
        Json results = Json::array();
        for (const auto& r : sr.results)
            results.push_back({{"variant", std::string(to_string(r.variant))},
                               {"alpha", r.alpha},
                               {"iterations_to_threshold", detail::optional_int(r.iterations_to_threshold)},
                               {"final_cost", detail::number_or_null(r.final_cost)},
                               {"final_distance", detail::number_or_null(r.final_distance)},
                               {"final_fp_residual", detail::number_or_null(r.final_fp_residual)}});
        s["results"] = std::move(results);
        seeds.push_back(std::move(s));
    }
    j["seeds"] = std::move(seeds);

    Json summary = Json::array();
    for (const auto& vs : rep.summary)
        summary.push_back({{"variant", std::string(to_string(vs.variant))},
                           {"seeds_reaching_threshold", vs.reached},
                           {"median_iterations", vs.median_iterations ? Json(*vs.median_iterations) : Json(nullptr)}});
    j["summary"] = std::move(summary);
    j["main_faster_than_shift"] = rep.main_faster_than_shift;
    j["dr_faster_than_ista"] = rep.dr_faster_than_ista;
    return j;
}

} // namespace wcdr
