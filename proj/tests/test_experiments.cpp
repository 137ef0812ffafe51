#include <aircomp/experiments.hpp>

#include <gtest/gtest.h>

#include <algorithm>

using namespace aircomp;

TEST(SnrToNoise, Definition) {
    EXPECT_DOUBLE_EQ(snr_to_noise_var(0, 10), 10.0);
    EXPECT_DOUBLE_EQ(snr_to_noise_var(10, 10), 1.0);
    EXPECT_NEAR(snr_to_noise_var(20, 10), 0.1, 1e-15);
}

TEST(Nmse, NormalizesBySensorCount) {
    EXPECT_DOUBLE_EQ(nmse(2.5, 10), 0.25);
    EXPECT_EQ(nmse(0.0, 4), 0.0);
    EXPECT_EQ(nmse(1.7, 1), 1.7);
}

namespace {

SystemConfig small_config() {
    SystemConfig cfg;
    cfg.K = 3;
    cfg.N = 4;
    cfg.P = 10;
    cfg.noise_var = 1.0;
    return cfg;
}

SolverOptions quick_options() {
    SolverOptions opt;
    opt.starts = 3;
    return opt;
}

}  // namespace

TEST(RunTrial, ZeroUncertaintyRealizedEqualsNominal) {
    auto cfg = small_config();
    cfg.s = 0.0;
    cfg.eval_mode = EvalMode::realized;
    const auto realized = run_trial(cfg, Scheme::nonrobust, quick_options(), 77);
    cfg.eval_mode = EvalMode::worst;
    const auto worst = run_trial(cfg, Scheme::nonrobust, quick_options(), 77);
    EXPECT_NEAR(realized.nmse, worst.nmse, 1e-14);
}

TEST(RunTrial, WorstDominatesRealized) {
    for (auto sampling : {ErrorSampling::surface, ErrorSampling::interior}) {
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            auto cfg = small_config();
            cfg.error_sampling = sampling;
            for (auto scheme : {Scheme::nonrobust, Scheme::robust_exact, Scheme::multistart}) {
                cfg.eval_mode = EvalMode::worst;
                const double w = run_trial(cfg, scheme, quick_options(), seed).nmse;
                cfg.eval_mode = EvalMode::realized;
                const double r = run_trial(cfg, scheme, quick_options(), seed).nmse;
                EXPECT_GE(w * (1 + 1e-12), r);
            }
        }
    }
}

TEST(RunTrial, Deterministic) {
    const auto a = run_trial(small_config(), Scheme::multistart, quick_options(), 5);
    const auto b = run_trial(small_config(), Scheme::multistart, quick_options(), 5);
    EXPECT_EQ(a.nmse, b.nmse);
    EXPECT_EQ(a.iterations, b.iterations);
}

TEST(RunTrial, RobustNeverWorseThanNonRobustUnderWorstCase) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const double r = run_trial(small_config(), Scheme::multistart, quick_options(), seed).nmse;
        const double n = run_trial(small_config(), Scheme::nonrobust, quick_options(), seed).nmse;
        EXPECT_LE(r, n);
    }
}

namespace {

SweepSpec tiny_spec() {
    SweepSpec spec;
    spec.kind = SweepKind::snr;
    spec.values = {10};
    spec.trials = 1;
    spec.schemes = {Scheme::robust_exact};
    spec.s_values = {0.4};
    spec.base = small_config();
    spec.options = quick_options();
    spec.master_seed = 3;
    return spec;
}

}  // namespace

TEST(RunSweep, SingleRecordEqualsSingleTrial) {
    const auto spec = tiny_spec();
    const auto rows = run_sweep(spec);
    ASSERT_EQ(rows.size(), 1u);
    const auto cfg = config_for_point(spec, 10, 0.4);
    const auto t = run_trial(cfg, Scheme::robust_exact, spec.options, trial_seed(spec, 10, 0));
    EXPECT_EQ(rows[0].nmse_mean, t.nmse);
    EXPECT_EQ(rows[0].nmse_std, 0.0);
    EXPECT_EQ(rows[0].trials, 1);
    EXPECT_EQ(rows[0].kind, "snr");
    EXPECT_EQ(rows[0].scheme, "robust_exact@s=0.4");
}

TEST(RunSweep, OrderIndependentAggregation) {
    auto spec = tiny_spec();
    spec.trials = 8;
    const auto rows = run_sweep(spec);
    auto trials = run_point(spec, 10, 0.4, Scheme::robust_exact);
    std::vector<TrialResult> shuffled;
    for (int i = 7; i >= 0; --i)
        shuffled.push_back(run_trial(config_for_point(spec, 10, 0.4), Scheme::robust_exact, spec.options, trial_seed(spec, 10, i)));
    std::reverse(shuffled.begin(), shuffled.end());
    for (std::size_t i = 0; i < trials.size(); ++i) EXPECT_EQ(trials[i].nmse, shuffled[i].nmse);
    const auto rec = aggregate(spec, 10, rows[0].scheme, shuffled);
    EXPECT_EQ(rec.nmse_mean, rows[0].nmse_mean);
    EXPECT_EQ(rec.nmse_std, rows[0].nmse_std);
}

TEST(RunSweep, Fig2GridRecordCountAndOrder) {
    auto spec = fig2_spec();
    spec.trials = 1;
    spec.options.starts = 2;
    const auto rows = run_sweep(spec);
    ASSERT_EQ(rows.size(), 5u * 2u * spec.schemes.size());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const bool ordered = rows[i - 1].value < rows[i].value ||
                             (rows[i - 1].value == rows[i].value && rows[i - 1].scheme < rows[i].scheme);
        EXPECT_TRUE(ordered) << i;
    }
    for (const auto& r : rows) {
        EXPECT_GE(r.nmse_mean, 0.0);
        EXPECT_GE(r.nmse_std, 0.0);
    }
}

TEST(RunSweep, DeterministicAcrossRuns) {
    auto spec = fig4_spec();
    spec.values = {2, 4};
    spec.trials = 4;
    spec.options.starts = 2;
    const auto a = run_sweep(spec);
    const auto b = run_sweep(spec);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].nmse_mean, b[i].nmse_mean);
        EXPECT_EQ(a[i].nmse_std, b[i].nmse_std);
    }
}

TEST(SweepSpec, Validation) {
    auto spec = tiny_spec();
    spec.values = {10, 5};
    EXPECT_THROW(spec.validate(), Error);
    spec = tiny_spec();
    spec.values.clear();
    EXPECT_THROW(spec.validate(), Error);
    spec = tiny_spec();
    spec.kind = SweepKind::n;
    spec.values = {4.5};
    EXPECT_THROW(spec.validate(), Error);
    spec = tiny_spec();
    spec.trials = 0;
    EXPECT_THROW(spec.validate(), Error);
}

TEST(SweepSpec, PointConfigs) {
    auto spec = fig3_spec();
    const auto cfg = config_for_point(spec, 32, 0.4);
    EXPECT_EQ(cfg.N, 32);
    EXPECT_EQ(cfg.K, 8);
    EXPECT_DOUBLE_EQ(cfg.noise_var, 10.0);
    spec = fig4_spec();
    EXPECT_EQ(config_for_point(spec, 6, 0.4).K, 6);
    EXPECT_EQ(config_for_point(spec, 6, 0.4).N, 64);
    EXPECT_DOUBLE_EQ(config_for_point(fig2_spec(), 20, 0.6).noise_var, 0.1);
}

TEST(FormatReal, ShortestRoundTrip) {
    EXPECT_EQ(format_real(0.4), "0.4");
    EXPECT_EQ(format_real(16), "16");
    EXPECT_EQ(format_real(0.1 + 0.2), "0.30000000000000004");
}
