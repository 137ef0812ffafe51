// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <aircomp/aircomp.hpp>

#include "oracles.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace aircomp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget_s > 0 && secs > budget_s) {
        o.pass = false;
        o.detail += " [over time budget]";
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// |t (h^H v + D v) - 1|^2 written out entry by entry.
double direct_perturbed_mse(Complex t, const CVector& h, const CVector& v, const CVector& d) {
    Complex gain{};
    for (std::size_t i = 0; i < h.size(); ++i) gain += (std::conj(h[i]) + d[i]) * v[i];
    return std::norm(t * gain - 1.0);
}

struct PointStats {
    double mean = 0.0;
    double se = 0.0;
};

PointStats stats(const std::vector<TrialResult>& r) {
    double m = 0.0;
    for (const auto& t : r) m += t.nmse;
    m /= r.size();
    double ss = 0.0;
    for (const auto& t : r) ss += (t.nmse - m) * (t.nmse - m);
    return {m, std::sqrt(ss / (r.size() - 1.0) / r.size())};
}

double combined(const PointStats& a, const PointStats& b) { return std::sqrt(a.se * a.se + b.se * b.se); }

int run_cli(const std::string& args) {
    const int status = std::system((std::string(AIRCOMP_CLI) + " " + args).c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

constexpr int kFigureTrials = 200;

}  // namespace

int main() {
    criterion(1, "worst-case certificate exactness", 10, [] {
        Rng rng(101);
        double worst_norm = 0.0, worst_mse = 0.0, worst_direct = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const auto c = random_sensor_case(rng, random_size(rng, 1, 8));
            const CVector d = delta_worst(c.t_hat, c.h_hat, c.v, c.eps);
            const double term = worst_case_term(c.t_hat, c.h_hat, c.v, c.eps);
            const Design one{1.0, {c.t_hat}, {c.v}};
            const std::vector<CVector> h{c.h_hat}, ds{d};
            const std::vector<double> eps{c.eps};
            worst_norm = std::max(worst_norm, rel_dev(norm(d), c.eps));
            worst_mse = std::max(worst_mse, rel_dev(mse_at_error(one, h, ds, 0.0, std::span<const double>(eps)), term));
            worst_direct = std::max(worst_direct, rel_dev(direct_perturbed_mse(c.t_hat, c.h_hat, c.v, d), term));
        }
        const bool ok = worst_norm <= 1e-10 && worst_mse <= 1e-10 && worst_direct <= 1e-10;
        return Outcome{ok, fmt("1000 instances, max rel dev |D|-eps %.2e, mse-term %.2e, direct-term %.2e", worst_norm,
                               worst_mse, worst_direct)};
    });

    criterion(2, "brute-force oracle equivalence", 60, [] {
        Rng rng(202);
        int above = 0, far = 0;
        double worst_gap = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const auto c = random_sensor_case(rng, random_size(rng, 1, 8));
            const double term = worst_case_term(c.t_hat, c.h_hat, c.v, c.eps);
            const double brute = brute_force_worst_case(c.t_hat, c.h_hat, c.v, c.eps, 10000, 50, rng);
            if (brute > term + 1e-9) ++above;
            const double gap = (term - brute) / term;
            if (gap > 1e-2) ++far;
            worst_gap = std::max(worst_gap, gap);
        }
        return Outcome{above == 0 && far == 0,
                       fmt("1000 instances, %d above closed form, %d beyond 1%%, worst rel gap %.2e", above, far, worst_gap)};
    });

    criterion(3, "KKT stationarity and gradient check", 10, [] {
        const auto r = verify_kkt(100, 303);
        return Outcome{r.ok(), fmt("%d/%d instances, max KKT residual %.2e", r.passed, r.trials, r.worst_deviation)};
    });

    criterion(4, "paper scalar update stationarity and convexity", 5, [] {
        Rng rng(404);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        double worst_res = 0.0;
        int nonconvex = 0;
        for (int i = 0; i < 100; ++i) {
            const double Q = 0.001 + U(rng), lam = 0.1 + 10 * U(rng), P = 1 + 99 * U(rng), nv = 0.01 + 10 * U(rng);
            const int N = 1 + static_cast<int>(64 * U(rng));
            const double x = t_mag_paper(Q, lam, N, P, nv);
            worst_res = std::max(worst_res, std::abs(oracle::lambda_objective_derivative(x, Q, lam, N, P, nv)));
            const double h = 1e-3 * x;
            const double second = oracle::lambda_objective(x + h, Q, lam, N, P, nv) -
                                  2 * oracle::lambda_objective(x, Q, lam, N, P, nv) +
                                  oracle::lambda_objective(x - h, Q, lam, N, P, nv);
            if (!(second > 0.0)) ++nonconvex;
        }
        return Outcome{worst_res <= 1e-9 && nonconvex == 0,
                       fmt("100 tuples, max |derivative| %.2e, %d non-positive second differences", worst_res, nonconvex)};
    });

    criterion(5, "exact scalar update vs grid", 10, [] {
        Rng rng(505);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        double worst_excess = -1e300;
        for (int i = 0; i < 200; ++i) {
            const double a = 0.05 + 3 * U(rng), e = 2 * U(rng), c = 0.001 + 2 * U(rng);
            const double tau = t_exact(a, e, c, 1.0);
            const auto grid = oracle::grid_minimum(a, e, c, 2.0 / a, 100000);
            worst_excess = std::max(worst_excess, oracle::scalar_objective(tau, a, e, c) - grid.value);
        }
        return Outcome{worst_excess <= 1e-9, fmt("200 tuples, max objective excess over grid %.2e", worst_excess)};
    });

    criterion(6, "scaling recovery identities", 0, [] {
        Rng rng(606);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        double worst_power = 0.0, worst_prod = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const int K = random_size(rng, 1, 16);
            const double P = 0.01 + 100 * U(rng);
            std::vector<Complex> th;
            for (int k = 0; k < K; ++k) th.push_back(sample_rayleigh_vector(1, std::pow(10.0, 4 * U(rng) - 2), rng)[0]);
            const auto s = recover_m_t(th, P);
            double power = 0.0;
            for (const auto& t : s.t) power += std::norm(t);
            worst_power = std::max(worst_power, rel_dev(power, P));
            for (int k = 0; k < K; ++k)
                worst_prod = std::max(worst_prod, std::abs(s.m * s.t[k] - th[k]) / std::max(std::abs(th[k]), 1e-300));
        }
        const double tol = 64 * std::numeric_limits<double>::epsilon();
        return Outcome{worst_power <= tol && worst_prod <= tol,
                       fmt("10000 inputs, max rel dev power %.2e, m*t %.2e (tolerance %.1e)", worst_power, worst_prod, tol)};
    });

    criterion(7, "safeguarded monotonicity", 30, [] {
        Rng rng(707);
        int violations = 0, runs = 0;
        for (int i = 0; i < 500; ++i) {
            const auto p = random_problem(rng);
            for (auto mode : {SolverMode::exact, SolverMode::paper}) {
                SolverOptions opt;
                opt.mode = mode;
                opt.safeguard = true;
                const auto r = run_algorithm1(p.cfg, p.h_hat, p.eps, opt, rng);
                ++runs;
                if (!trace_non_increasing(r.trace)) ++violations;
            }
        }
        return Outcome{violations == 0, fmt("500 instances x 2 modes, %d of %d traces increased", violations, runs)};
    });

    criterion(8, "NMSE vs SNR properties", 180, [] {
        auto spec = fig2_spec();
        spec.trials = kFigureTrials;
        spec.options.mode = SolverMode::exact;
        spec.options.include_nonrobust_start = true;
        int dominated = 0, total = 0, trend = 0, s_order = 0;
        std::map<std::pair<double, Scheme>, std::vector<PointStats>> curve;  // (s, scheme) -> by SNR
        std::vector<std::string> report;
        for (double s : spec.s_values) {
            for (double snr : spec.values) {
                const auto robust = run_point(spec, snr, s, Scheme::multistart);
                const auto base = run_point(spec, snr, s, Scheme::nonrobust);
                for (std::size_t i = 0; i < robust.size(); ++i, ++total)
                    if (robust[i].nmse > base[i].nmse) ++dominated;
                curve[{s, Scheme::multistart}].push_back(stats(robust));
                curve[{s, Scheme::nonrobust}].push_back(stats(base));
            }
        }
        for (const auto& [key, pts] : curve)
            for (std::size_t i = 1; i < pts.size(); ++i)
                if (pts[i].mean > pts[i - 1].mean + 2 * combined(pts[i], pts[i - 1])) ++trend;
        for (auto scheme : {Scheme::multistart, Scheme::nonrobust}) {
            const auto& lo = curve[{0.4, scheme}];
            const auto& hi = curve[{0.6, scheme}];
            for (std::size_t i = 0; i < lo.size(); ++i)
                if (lo[i].mean > hi[i].mean + 2 * combined(lo[i], hi[i])) ++s_order;
        }
        std::string means;
        for (double s : spec.s_values)
            for (auto scheme : {Scheme::multistart, Scheme::nonrobust}) {
                means += fmt(" %s@%g:", to_string(scheme), s);
                for (const auto& p : curve[{s, scheme}]) means += fmt(" %.4g", p.mean);
            }
        return Outcome{dominated == 0 && trend == 0 && s_order == 0,
                       fmt("%d/%d trials robust > non-robust, %d SNR trend violations, %d s-order violations;", dominated,
                           total, trend, s_order) +
                           means};
    });

    criterion(9, "NMSE vs N properties", 180, [] {
        auto spec = fig3_spec();
        spec.trials = kFigureTrials;
        int trend = 0;
        std::string means;
        for (auto scheme : spec.schemes) {
            std::vector<PointStats> pts;
            for (double n : spec.values) pts.push_back(stats(run_point(spec, n, 0.4, scheme)));
            means += fmt(" %s:", to_string(scheme));
            for (std::size_t i = 0; i < pts.size(); ++i) {
                means += fmt(" %.4g", pts[i].mean);
                if (i > 0 && pts[i].mean > pts[i - 1].mean + 2 * combined(pts[i], pts[i - 1])) ++trend;
            }
        }
        return Outcome{trend == 0, fmt("%d N trend violations;", trend) + means};
    });

    criterion(10, "NMSE vs K properties", 300, [] {
        auto spec = fig4_spec();
        spec.trials = kFigureTrials;
        int trend = 0;
        std::map<Scheme, std::vector<PointStats>> curve;
        std::string means;
        for (auto scheme : spec.schemes) {
            auto& pts = curve[scheme];
            for (double k : spec.values) pts.push_back(stats(run_point(spec, k, 0.4, scheme)));
            means += fmt(" %s:", to_string(scheme));
            for (std::size_t i = 0; i < pts.size(); ++i) {
                means += fmt(" %.4g", pts[i].mean);
                if (i > 0 && pts[i].mean < pts[i - 1].mean - 2 * combined(pts[i], pts[i - 1])) ++trend;
            }
        }
        const auto& r = curve[Scheme::multistart];
        const auto& b = curve[Scheme::nonrobust];
        const double gap_first = b.front().mean - r.front().mean;
        const double gap_last = b.back().mean - r.back().mean;
        return Outcome{trend == 0 && gap_last > gap_first,
                       fmt("%d K trend violations, gap K=2 %.4g, gap K=12 %.4g;", trend, gap_first, gap_last) + means};
    });

    criterion(11, "multi-start proximity report", 0, [] {
        int worse = 0;
        std::string report;
        for (auto mode : {SolverMode::exact, SolverMode::paper}) {
            Rng rng(1111);
            SystemConfig cfg;
            cfg.K = 10;
            cfg.N = 16;
            cfg.P = 10;
            cfg.noise_var = snr_to_noise_var(10, cfg.P);
            SolverOptions opt;
            opt.mode = mode;
            opt.include_nonrobust_start = false;
            std::vector<double> gaps;
            for (int i = 0; i < 100; ++i) {
                std::vector<CVector> h;
                std::vector<double> eps;
                for (auto& c : synthesize_channels(cfg, rng)) {
                    h.push_back(std::move(c.h_hat));
                    eps.push_back(c.eps);
                }
                const std::uint64_t seed = rng();
                Rng single_rng(seed), multi_rng(seed);
                opt.starts = 1;
                const double single = multi_start(cfg, h, eps, opt, single_rng).objective;
                opt.starts = 50;
                const double multi = multi_start(cfg, h, eps, opt, multi_rng).objective;
                if (multi > single) ++worse;
                gaps.push_back((single - multi) / single);
            }
            std::sort(gaps.begin(), gaps.end());
            report += fmt(" %s: median rel gap %.3e, p90 %.3e, max %.3e;", mode == SolverMode::exact ? "exact" : "paper",
                          gaps[gaps.size() / 2], gaps[gaps.size() * 9 / 10], gaps.back());
        }
        return Outcome{worse == 0, fmt("200 instances, %d with multistart worse;", worse) + report};
    });

    criterion(12, "sweep determinism", 0, [] {
        const auto dir = fs::temp_directory_path() / "aircomp_acceptance_sweep";
        fs::remove_all(dir);
        fs::create_directories(dir);
        std::ofstream(dir / "c.json") << R"({"system": {"K": 10, "N": 16, "P": 10},
          "sweep": {"trials": 20, "s_values": [0.4, 0.6]}, "master_seed": 12})";
        const std::string base = "sweep --kind snr --config " + (dir / "c.json").string() + " --out ";
        const int a = run_cli(base + (dir / "a.csv").string());
        const int b = run_cli(base + (dir / "b.csv").string());
        const auto sa = slurp(dir / "a.csv"), sb = slurp(dir / "b.csv");
        fs::remove_all(dir);
        const bool ok = a == 0 && b == 0 && !sa.empty() && sa == sb;
        return Outcome{ok, fmt("exit codes %d/%d, %zu bytes, identical=%s", a, b, sa.size(), sa == sb ? "yes" : "no")};
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
