#include <wcdr/io.hpp>

#include <gtest/gtest.h>

#include <sstream>
#include <string>

using namespace wcdr;

TEST(TraceCsv, HeaderAndPrecision)
{
    const auto inst = build_instance(exp2_spec(), 1);
    const auto p = inst.problem();
    SolverConfig cfg;
    cfg.variant = Variant::dr_main_fg;
    cfg.alpha = default_alpha(cfg.variant, p.f.strong_convexity(), p.f.lipschitz(), p.rho());
    cfg.max_iters = 5;
    const auto tr = run(p, cfg);

    std::ostringstream out;
    write_trace_csv(out, tr);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "iter,cost,step_norm,fp_residual,dist_to_ref");
    int n = 0;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string iter, cost;
        std::getline(fields, iter, ',');
        std::getline(fields, cost, ',');
        EXPECT_EQ(std::stoi(iter), n);
        EXPECT_EQ(std::stod(cost), tr.rows[static_cast<std::size_t>(n)].cost); // 17 digits round-trip
        EXPECT_NE(line.find("nan"), std::string::npos);                        // no reference given
        ++n;
    }
    EXPECT_EQ(n, 6);
}

TEST(TraceJson, EchoesConfig)
{
    const auto inst = build_instance(exp2_spec(), 1);
    const auto p = inst.problem();
    SolverConfig cfg;
    cfg.variant = Variant::ista;
    cfg.alpha = 1.0 / p.f.lipschitz();
    cfg.max_iters = 3;
    const auto j = trace_to_json(run(p, cfg), cfg);
    EXPECT_EQ(j["config"]["variant"], "ista");
    EXPECT_EQ(j["iterations"], 3);
    EXPECT_EQ(j["x"].size(), 90u);
    EXPECT_TRUE(j["final"]["dist_to_ref"].is_null());
}

TEST(InstanceJson, BitExactRoundTrip)
{
    const auto inst = build_instance(exp1_spec(), 6);
    const auto text = instance_to_json(inst).dump();
    const auto back = instance_from_json(Json::parse(text));
    EXPECT_EQ(back.taps, inst.taps);
    EXPECT_EQ(back.y, inst.y);
    EXPECT_EQ(back.ground_truth, inst.ground_truth);
    EXPECT_EQ(back.tau, inst.tau);
    EXPECT_EQ(back.rho, inst.rho);
    EXPECT_EQ(back.noise_std, inst.noise_std);
    EXPECT_EQ(back.seed, inst.seed);
    EXPECT_EQ(back.signal_len, inst.signal_len);
}

TEST(InstanceJson, Malformed)
{
    EXPECT_THROW(instance_from_json(Json::parse(R"({"filter": [1.0]})")), Error);
    auto j = instance_to_json(build_instance(exp2_spec(), 0));
    j["y"] = std::vector<double>{1.0, 2.0};
    EXPECT_THROW(instance_from_json(j), Error);
}

TEST(ReportJson, Summary)
{
    auto spec = exp2_spec();
    spec.n_seeds = 1;
    spec.max_iters = 50;
    spec.reference_iters = 200;
    const auto j = report_to_json(run_experiment(spec));
    EXPECT_EQ(j["spec"]["name"], "exp2");
    EXPECT_EQ(j["seeds"].size(), 1u);
    EXPECT_EQ(j["summary"].size(), 3u);
    EXPECT_EQ(j["seeds"][0]["results"][2]["variant"], "ista");
}
