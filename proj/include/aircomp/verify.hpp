/**
 * @file verify.hpp
 * @brief Randomized property suites over the worst-case certificate and the
 *        alternating solver, shared by the CLI and the test binaries.
 */
#pragma once

#include <aircomp/model.hpp>
#include <aircomp/optimizer.hpp>
#include <aircomp/worst_case.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace aircomp {

/// A unit-scale single-sensor instance: h_hat ~ CN(0, I), unit-modulus v,
/// t_hat ~ CN(0, 1) and eps = s ||h_hat|| with s ~ U[0.1, 0.8].
struct SensorCase {
    Complex t_hat;
    CVector h_hat;
    CVector v;
    double eps = 0.0;
};

inline SensorCase random_sensor_case(Rng& rng, int N) {
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> coeff(0.1, 0.8);
    CVector h = sample_rayleigh_vector(N, 1.0, rng);
    CVector v(static_cast<std::size_t>(N));
    for (auto& z : v) z = std::polar(1.0, phase(rng));
    const Complex t_hat = sample_rayleigh_vector(1, 1.0, rng)[0];
    const double eps = coeff(rng) * norm(h);
    return SensorCase{t_hat, std::move(h), std::move(v), eps};
}

inline int random_size(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

struct SuiteReport {
    std::string suite;
    int trials = 0;
    int passed = 0;
    int failed = 0;
    double worst_deviation = 0.0;
    double tolerance = 0.0;

    bool ok() const noexcept { return failed == 0 && passed == trials; }
};

inline double rel_dev(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

/// ||delta_worst|| = eps and the MSE at delta_worst equals worst_case_term, both to 1e-10 relative.
inline SuiteReport verify_worstcase(int trials, std::uint64_t seed) {
    SuiteReport r{"worstcase", trials, 0, 0, 0.0, 1e-10};
    Rng rng(seed);
    for (int i = 0; i < trials; ++i) {
        const auto c = random_sensor_case(rng, random_size(rng, 1, 8));
        const CVector d = delta_worst(c.t_hat, c.h_hat, c.v, c.eps);
        const double term = worst_case_term(c.t_hat, c.h_hat, c.v, c.eps);
        const double dev =
            std::max(rel_dev(norm(d), c.eps), rel_dev(perturbed_term(c.t_hat, c.h_hat, c.v, d), term));
        r.worst_deviation = std::max(r.worst_deviation, dev);
        (dev <= r.tolerance ? r.passed : r.failed)++;
    }
    return r;
}

/// Central-difference gradient of the Lagrangian, packed like lagrangian_gradient:
/// component i holds (dL/dRe D_i + j dL/dIm D_i) / 2.
inline CVector finite_difference_gradient(Complex t_hat, const CVector& h_hat, const CVector& v, double eps,
                                          const CVector& delta, double lambda, double step) {
    CVector g(delta.size());
    for (std::size_t i = 0; i < delta.size(); ++i) {
        CVector p = delta, m = delta;
        p[i] += Complex(step, 0.0);
        m[i] -= Complex(step, 0.0);
        const double dre = (lagrangian(t_hat, h_hat, v, eps, p, lambda) - lagrangian(t_hat, h_hat, v, eps, m, lambda)) / (2 * step);
        p = delta;
        m = delta;
        p[i] += Complex(0.0, step);
        m[i] -= Complex(0.0, step);
        const double dim = (lagrangian(t_hat, h_hat, v, eps, p, lambda) - lagrangian(t_hat, h_hat, v, eps, m, lambda)) / (2 * step);
        g[i] = 0.5 * Complex(dre, dim);
    }
    return g;
}

/// KKT residual <= 1e-8 at the closed-form pair, and the analytic Lagrangian gradient at a
/// random feasible point matches central differences (step 1e-6) within 1e-5.
inline SuiteReport verify_kkt(int trials, std::uint64_t seed) {
    SuiteReport r{"kkt", trials, 0, 0, 0.0, 1e-8};
    Rng rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 3.0);
    for (int i = 0; i < trials; ++i) {
        const auto c = random_sensor_case(rng, random_size(rng, 1, 8));
        const CVector d = delta_worst(c.t_hat, c.h_hat, c.v, c.eps);
        const double lam = lambda_worst(c.t_hat, c.h_hat, c.v, c.eps);
        const double kkt = kkt_residual(c.t_hat, c.h_hat, c.v, c.eps, d, lam);

        const int n = static_cast<int>(c.v.size());
        const CVector probe = sample_bounded_error(n, c.eps, ErrorSampling::interior, rng);
        const double probe_lambda = unif(rng);
        const CVector analytic = lagrangian_gradient(c.t_hat, c.h_hat, c.v, probe, probe_lambda);
        const CVector numeric = finite_difference_gradient(c.t_hat, c.h_hat, c.v, c.eps, probe, probe_lambda, 1e-6);
        double fd = 0.0;
        for (std::size_t k = 0; k < analytic.size(); ++k) fd = std::max(fd, std::abs(analytic[k] - numeric[k]));

        r.worst_deviation = std::max(r.worst_deviation, kkt);
        (kkt <= 1e-8 && fd <= 1e-5 ? r.passed : r.failed)++;
    }
    return r;
}

/// Brute-force search never beats the closed form (+1e-9) and reaches it within 1% relative.
inline SuiteReport verify_oracle(int trials, std::uint64_t seed, int samples = 10000, int refine_steps = 50) {
    SuiteReport r{"oracle", trials, 0, 0, 0.0, 1e-2};
    Rng rng(seed);
    for (int i = 0; i < trials; ++i) {
        const auto c = random_sensor_case(rng, random_size(rng, 1, 8));
        const double term = worst_case_term(c.t_hat, c.h_hat, c.v, c.eps);
        const double brute = brute_force_worst_case(c.t_hat, c.h_hat, c.v, c.eps, samples, refine_steps, rng);
        const double dev = (term - brute) / term;
        r.worst_deviation = std::max(r.worst_deviation, std::abs(dev));
        (brute <= term + 1e-9 && dev <= 1e-2 ? r.passed : r.failed)++;
    }
    return r;
}

/// A random multi-sensor problem in unit scale.
struct ProblemCase {
    SystemConfig cfg;
    std::vector<CVector> h_hat;
    std::vector<double> eps;
};

inline ProblemCase random_problem(Rng& rng, int max_k = 6, int max_n = 8) {
    ProblemCase p;
    p.cfg.K = random_size(rng, 1, max_k);
    p.cfg.N = random_size(rng, 1, max_n);
    p.cfg.P = std::uniform_real_distribution<double>(1.0, 100.0)(rng);
    p.cfg.noise_var = std::uniform_real_distribution<double>(0.01, 10.0)(rng);
    p.cfg.s = std::uniform_real_distribution<double>(0.0, 0.8)(rng);
    for (int k = 0; k < p.cfg.K; ++k) {
        CVector g = sample_rayleigh_vector(p.cfg.N, p.cfg.channel_var, rng);
        CVector rr = sample_rayleigh_vector(p.cfg.N, p.cfg.channel_var, rng);
        CVector h = cascade_channel(g, rr);
        const double eps = epsilon_from_coefficient(p.cfg.s, h);
        p.h_hat.push_back(apply_error(h, sample_bounded_error(p.cfg.N, eps, ErrorSampling::interior, rng)));
        p.eps.push_back(eps);
    }
    return p;
}

inline bool trace_non_increasing(const IterTrace& t) {
    double prev = t.initial_objective;
    for (const auto& it : t.iterations) {
        if (it.objective > prev) return false;
        prev = it.objective;
    }
    return true;
}

/// Safeguarded runs (both modes) never increase the worst-case objective between iterations.
inline SuiteReport verify_monotone(int trials, std::uint64_t seed) {
    SuiteReport r{"monotone", trials, 0, 0, 0.0, 0.0};
    Rng rng(seed);
    for (int i = 0; i < trials; ++i) {
        const auto p = random_problem(rng);
        SolverOptions opt;
        opt.safeguard = true;
        opt.mode = i % 2 == 0 ? SolverMode::exact : SolverMode::paper;
        opt.max_iters = 50;
        const auto res = run_algorithm1(p.cfg, p.h_hat, p.eps, opt, rng);
        double worst = 0.0, prev = res.trace.initial_objective;
        for (const auto& it : res.trace.iterations) {
            worst = std::max(worst, it.objective - prev);
            prev = it.objective;
        }
        r.worst_deviation = std::max(r.worst_deviation, worst);
        (trace_non_increasing(res.trace) ? r.passed : r.failed)++;
    }
    return r;
}

inline SuiteReport run_verify_suite(std::string_view suite, int trials, std::uint64_t seed) {
    if (trials < 1) throw Error(ErrorCode::InvalidConfig, "trials must be >= 1");
    if (suite == "worstcase") return verify_worstcase(trials, seed);
    if (suite == "kkt") return verify_kkt(trials, seed);
    if (suite == "oracle") return verify_oracle(trials, seed);
    if (suite == "monotone") return verify_monotone(trials, seed);
    throw Error(ErrorCode::InvalidConfig, "unknown suite '" + std::string(suite) + "'");
}

}  // namespace aircomp
