/**
 * @file experiments.hpp
 * @brief Monte Carlo NMSE sweeps over SNR, RIS size N and sensor count K.
 */
#pragma once

#include <aircomp/model.hpp>
#include <aircomp/optimizer.hpp>
#include <aircomp/worst_case.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace aircomp {

enum class Scheme { robust_paper, robust_exact, nonrobust, multistart };
enum class SweepKind { snr, n, k };

inline const char* to_string(Scheme s) noexcept {
    switch (s) {
        case Scheme::robust_paper: return "robust_paper";
        case Scheme::robust_exact: return "robust_exact";
        case Scheme::nonrobust: return "nonrobust";
        case Scheme::multistart: return "multistart";
    }
    return "?";
}

inline const char* to_string(SweepKind k) noexcept {
    switch (k) {
        case SweepKind::snr: return "snr";
        case SweepKind::n: return "n";
        case SweepKind::k: return "k";
    }
    return "?";
}

inline Scheme parse_scheme(std::string_view s) {
    for (auto v : {Scheme::robust_paper, Scheme::robust_exact, Scheme::nonrobust, Scheme::multistart})
        if (s == to_string(v)) return v;
    throw Error(ErrorCode::InvalidConfig, "unknown scheme '" + std::string(s) + "'");
}

inline SweepKind parse_sweep_kind(std::string_view s) {
    for (auto v : {SweepKind::snr, SweepKind::n, SweepKind::k})
        if (s == to_string(v)) return v;
    throw Error(ErrorCode::InvalidConfig, "unknown sweep kind '" + std::string(s) + "'");
}

/// Shortest decimal that round-trips to the same double.
inline std::string format_real(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

inline double snr_to_noise_var(double snr_db, double P) { return P * std::pow(10.0, -snr_db / 10.0); }

inline double nmse(double mse, int K) { return mse / K; }

struct TrialResult {
    double nmse = 0.0;
    int iterations = 0;
};

/// One Monte Carlo trial. Channels come from derive_seed(trial_seed, {0}) and are shared by
/// every scheme; the designer's own randomness is keyed by the scheme as well.
inline TrialResult run_trial(const SystemConfig& cfg, Scheme scheme, const SolverOptions& opt,
                             std::uint64_t trial_seed) {
    cfg.validate();
    Rng channel_rng(derive_seed(trial_seed, {0}));
    const ChannelInstance ch = synthesize_channels(cfg, channel_rng);

    std::vector<CVector> h_hat;
    std::vector<double> eps;
    for (const auto& c : ch) {
        h_hat.push_back(c.h_hat);
        eps.push_back(c.eps);
    }

    Rng solver_rng(derive_seed(trial_seed, {1, static_cast<std::uint64_t>(scheme)}));
    Design design;
    int iterations = 0;
    switch (scheme) {
        case Scheme::robust_paper:
        case Scheme::robust_exact: {
            SolverOptions o = opt;
            o.mode = scheme == Scheme::robust_paper ? SolverMode::paper : SolverMode::exact;
            auto r = run_algorithm1(cfg, h_hat, eps, o, solver_rng);
            design = std::move(r.design);
            iterations = static_cast<int>(r.trace.size());
            break;
        }
        case Scheme::nonrobust:
            design = nonrobust_design(cfg, h_hat);
            iterations = 1;
            break;
        case Scheme::multistart: {
            auto r = multi_start(cfg, h_hat, eps, opt, solver_rng);
            design = std::move(r.design);
            iterations = static_cast<int>(r.trace.size());
            break;
        }
    }

    double mse = 0.0;
    if (cfg.eval_mode == EvalMode::worst) {
        mse = worst_case_objective(design, h_hat, eps, cfg.noise_var);
    } else {
        std::vector<CVector> delta;
        for (const auto& c : ch) delta.push_back(row_difference(c.h, c.h_hat));
        mse = mse_at_error(design, h_hat, delta, cfg.noise_var);
    }
    return TrialResult{nmse(mse, cfg.K), iterations};
}

struct SweepSpec {
    SweepKind kind = SweepKind::snr;
    std::vector<double> values;
    int trials = 200;
    std::vector<Scheme> schemes{Scheme::multistart, Scheme::nonrobust};
    std::vector<double> s_values{0.4};
    /// Fixed SNR used by the n and k sweeps.
    double snr_db = 10.0;
    SystemConfig base;
    SolverOptions options;
    std::uint64_t master_seed = 1;

    void validate() const {
        auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidConfig, m); };
        base.validate();
        options.validate();
        if (values.empty()) fail("sweep values must be non-empty");
        for (std::size_t i = 1; i < values.size(); ++i)
            if (!(values[i] > values[i - 1])) fail("sweep values must be strictly increasing");
        for (double v : values) {
            if (!std::isfinite(v)) fail("sweep values must be finite");
            if (kind != SweepKind::snr && (v < 1 || v != std::floor(v))) fail("n/k sweep values must be integers >= 1");
        }
        if (trials < 1) fail("trials must be >= 1");
        if (schemes.empty()) fail("schemes must be non-empty");
        if (s_values.empty()) fail("s_values must be non-empty");
        for (double s : s_values)
            if (!(s >= 0.0) || !std::isfinite(s)) fail("s values must be finite and >= 0");
        if (!std::isfinite(snr_db)) fail("snr_db must be finite");
    }

    bool operator==(const SweepSpec&) const = default;
};

struct AggregateRecord {
    std::string kind;
    double value = 0.0;
    std::string scheme;
    double nmse_mean = 0.0;
    double nmse_std = 0.0;
    int trials = 0;
    double mean_iters = 0.0;
};

inline std::string scheme_label(Scheme scheme, double s) { return std::string(to_string(scheme)) + "@s=" + format_real(s); }

inline SystemConfig config_for_point(const SweepSpec& spec, double value, double s) {
    SystemConfig cfg = spec.base;
    cfg.s = s;
    switch (spec.kind) {
        case SweepKind::snr: cfg.noise_var = snr_to_noise_var(value, cfg.P); break;
        case SweepKind::n:
            cfg.N = static_cast<int>(value);
            cfg.noise_var = snr_to_noise_var(spec.snr_db, cfg.P);
            break;
        case SweepKind::k:
            cfg.K = static_cast<int>(value);
            cfg.noise_var = snr_to_noise_var(spec.snr_db, cfg.P);
            break;
    }
    return cfg;
}

/// Seed of one trial; independent of scheme and s so all series see the same channel draws.
inline std::uint64_t trial_seed(const SweepSpec& spec, double value, int trial) {
    return derive_seed(spec.master_seed, {static_cast<std::uint64_t>(spec.kind), std::bit_cast<std::uint64_t>(value),
                                          static_cast<std::uint64_t>(trial)});
}

inline std::vector<TrialResult> run_point(const SweepSpec& spec, double value, double s, Scheme scheme) {
    const SystemConfig cfg = config_for_point(spec, value, s);
    std::vector<TrialResult> out(static_cast<std::size_t>(spec.trials));
    for (int i = 0; i < spec.trials; ++i) out[static_cast<std::size_t>(i)] = run_trial(cfg, scheme, spec.options, trial_seed(spec, value, i));
    return out;
}

inline AggregateRecord aggregate(const SweepSpec& spec, double value, const std::string& label,
                                 const std::vector<TrialResult>& trials) {
    AggregateRecord rec;
    rec.kind = to_string(spec.kind);
    rec.value = value;
    rec.scheme = label;
    rec.trials = static_cast<int>(trials.size());
    double sum = 0.0, iters = 0.0;
    for (const auto& t : trials) {
        sum += t.nmse;
        iters += t.iterations;
    }
    const double n = static_cast<double>(trials.size());
    rec.nmse_mean = sum / n;
    rec.mean_iters = iters / n;
    if (trials.size() > 1) {
        double ss = 0.0;
        for (const auto& t : trials) ss += (t.nmse - rec.nmse_mean) * (t.nmse - rec.nmse_mean);
        rec.nmse_std = std::sqrt(ss / (n - 1.0));
    }
    return rec;
}

/// Records ordered by (value, scheme label).
inline std::vector<AggregateRecord> run_sweep(const SweepSpec& spec) {
    spec.validate();
    std::vector<AggregateRecord> out;
    for (double value : spec.values) {
        std::vector<AggregateRecord> point;
        for (double s : spec.s_values)
            for (Scheme scheme : spec.schemes)
                point.push_back(aggregate(spec, value, scheme_label(scheme, s), run_point(spec, value, s, scheme)));
        std::sort(point.begin(), point.end(), [](const auto& a, const auto& b) { return a.scheme < b.scheme; });
        out.insert(out.end(), point.begin(), point.end());
    }
    return out;
}

/// NMSE vs SNR: N = 16, K = 10, P = 10, s in {0.4, 0.6}, SNR 0..20 dB.
inline SweepSpec fig2_spec() {
    SweepSpec spec;
    spec.kind = SweepKind::snr;
    spec.values = {0, 5, 10, 15, 20};
    spec.s_values = {0.4, 0.6};
    spec.base.N = 16;
    spec.base.K = 10;
    spec.base.P = 10;
    return spec;
}

/// NMSE vs N: K = 8, P = 100, s = 0.4.
inline SweepSpec fig3_spec() {
    SweepSpec spec;
    spec.kind = SweepKind::n;
    spec.values = {8, 16, 32, 64};
    spec.s_values = {0.4};
    spec.base.K = 8;
    spec.base.P = 100;
    return spec;
}

/// NMSE vs K: N = 64, P = 100, s = 0.4.
inline SweepSpec fig4_spec() {
    SweepSpec spec;
    spec.kind = SweepKind::k;
    spec.values = {2, 4, 6, 8, 10, 12};
    spec.s_values = {0.4};
    spec.base.N = 64;
    spec.base.P = 100;
    return spec;
}

}  // namespace aircomp
