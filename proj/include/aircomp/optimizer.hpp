/**
 * @file optimizer.hpp
 * @brief Alternating joint design of RIS phases and Tx/Rx scalings under the
 *        worst-case objective.
 *
 * Once the sum-power constraint is active (sum_k |t_k|^2 = P, m^2 = sum_k
 * |t_hat_k|^2 / P) the worst-case objective separates per sensor:
 *
 *     J = sum_k J_k,  J_k = (|t_hat_k a_k - 1| + |t_hat_k| eps_k sqrt(N))^2
 *                           + (noise_var / P) |t_hat_k|^2,
 *
 * where a_k = h_hat_k^H v_k after co-phasing. Every update below works on
 * the per-sensor pair (v_k, t_hat_k) and recovers (m, t) afterwards, so one
 * sweep costs O(K N).
 */
#pragma once

#include <aircomp/model.hpp>
#include <aircomp/worst_case.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

namespace aircomp {

enum class SolverMode { paper, exact };
enum class InitRule { random_phase, cophase };

struct SolverOptions {
    SolverMode mode = SolverMode::exact;
    double delta_stop = 1e-8;
    int max_iters = 200;
    bool safeguard = true;
    int starts = 10;
    bool include_nonrobust_start = true;
    InitRule init_rule = InitRule::random_phase;
    /// Compute lambda_k with the freshly co-phased v_k instead of the previous iterate.
    bool lambda_after_phase = false;

    void validate() const {
        if (!(delta_stop > 0.0) || !std::isfinite(delta_stop))
            throw Error(ErrorCode::InvalidConfig, "delta_stop must be finite and > 0");
        if (max_iters < 1) throw Error(ErrorCode::InvalidConfig, "max_iters must be >= 1");
        if (starts < 1) throw Error(ErrorCode::InvalidConfig, "starts must be >= 1");
    }

    bool operator==(const SolverOptions&) const = default;
};

struct IterRecord {
    double objective = 0.0;
    double change = 0.0;
    std::vector<double> lambda;  ///< +inf where eps_k = 0
    std::vector<double> a;
};

struct IterTrace {
    double initial_objective = 0.0;
    std::vector<IterRecord> iterations;
    bool converged = false;

    std::size_t size() const noexcept { return iterations.size(); }
};

struct SolveResult {
    Design design;
    IterTrace trace;
};

/// v_i = exp(j arg h_hat_i), so that h_hat^H v = sum_i |h_hat_i|. Zero entries get phase 0.
inline CVector update_phases(const CVector& h_hat) {
    CVector v(h_hat.size());
    for (std::size_t i = 0; i < h_hat.size(); ++i)
        v[i] = h_hat[i] == Complex{} ? Complex{1.0, 0.0} : std::polar(1.0, std::arg(h_hat[i]));
    return v;
}

/// Stationary |t_hat|^2 of Q / (1 - N x / lambda)^2 + (noise_var / P) x,
/// x = lambda (1 + cbrt(2 N P Q / (lambda noise_var))) / N.
inline double t_mag_paper(double Q, double lambda, int N, double P, double noise_var) {
    if (!(noise_var > 0.0)) throw Error(ErrorCode::InvalidNoise, "t_mag_paper requires noise_var > 0");
    if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "t_mag_paper requires lambda > 0");
    if (N < 1 || !(P > 0.0) || Q < 0.0) throw Error(ErrorCode::InvalidArgument, "t_mag_paper: invalid N, P or Q");
    return lambda * (1.0 + std::cbrt(2.0 * N * P * Q / (lambda * noise_var))) / N;
}

/// Minimizer over tau >= 0 of (|tau a - 1| + eps_rootN tau)^2 + (noise_var / P) tau^2.
inline double t_exact(double a, double eps_rootN, double noise_var, double P) {
    const double b = a - eps_rootN;
    if (b <= 0.0) return 0.0;
    const double c = noise_var / P;
    return std::min(b / (b * b + c), 1.0 / a);
}

struct Scalings {
    double m = 0.0;
    std::vector<Complex> t;
};

/// m = sqrt(sum |t_hat|^2 / P), t_k = t_hat_k / m.
inline Scalings recover_m_t(std::span<const Complex> t_hat, double P) {
    if (!(P > 0.0)) throw Error(ErrorCode::InvalidArgument, "recover_m_t requires P > 0");
    double total = 0.0;
    for (const auto& th : t_hat) total += std::norm(th);
    if (!(total > 0.0)) throw Error(ErrorCode::AllZeroScalers, "every effective scaler is zero");
    Scalings out;
    out.m = std::sqrt(total / P);
    out.t.reserve(t_hat.size());
    for (const auto& th : t_hat) out.t.push_back(th / out.m);
    return out;
}

namespace detail {

struct Instance {
    std::span<const CVector> h_hat;
    std::span<const double> eps;
    int N = 0;
    double P = 0.0;
    double noise_var = 0.0;
};

inline Instance make_instance(const SystemConfig& cfg, std::span<const CVector> h_hat_set,
                              std::span<const double> eps_set) {
    cfg.validate();
    if (h_hat_set.size() != static_cast<std::size_t>(cfg.K))
        throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(cfg.K) + " channel estimates");
    if (eps_set.size() != h_hat_set.size()) throw Error(ErrorCode::DimensionMismatch, "eps_set size");
    for (const auto& h : h_hat_set)
        if (h.size() != static_cast<std::size_t>(cfg.N))
            throw Error(ErrorCode::DimensionMismatch, "channel estimate length differs from N");
    for (double e : eps_set)
        if (!(e >= 0.0) || !std::isfinite(e)) throw Error(ErrorCode::InvalidArgument, "eps must be finite and >= 0");
    return Instance{h_hat_set, eps_set, cfg.N, cfg.P, cfg.noise_var};
}

/// Per-sensor share of the worst-case objective under an active power constraint.
inline double sensor_objective(const Instance& in, std::size_t k, Complex t_hat, const CVector& v) {
    return worst_case_term(t_hat, in.h_hat[k], v, in.eps[k]) + in.noise_var / in.P * std::norm(t_hat);
}

inline Complex align(double tau, Complex z) { return std::abs(z) > 0.0 ? tau * std::conj(z) / std::abs(z) : tau; }

/// Design carrying the given effective scalers; the all-zero case switches the receiver off
/// (m = 0) and spreads the power uniformly.
inline Design assemble(std::span<const Complex> t_hat, std::vector<CVector> v, double P) {
    Design d;
    d.v = std::move(v);
    bool any = false;
    for (const auto& th : t_hat) any = any || std::norm(th) > 0.0;
    if (any) {
        auto s = recover_m_t(t_hat, P);
        d.m = s.m;
        d.t = std::move(s.t);
    } else {
        d.m = 0.0;
        d.t.assign(t_hat.size(), Complex(std::sqrt(P / static_cast<double>(t_hat.size())), 0.0));
    }
    return d;
}

}  // namespace detail

/// Classical MMSE design with eps = 0: co-phased v_k and t_hat_k = a_k / (a_k^2 + noise_var / P).
inline Design nonrobust_design(const SystemConfig& cfg, std::span<const CVector> h_hat_set) {
    cfg.validate();
    if (h_hat_set.size() != static_cast<std::size_t>(cfg.K))
        throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(cfg.K) + " channel estimates");
    const double c = cfg.noise_var / cfg.P;
    std::vector<CVector> v;
    std::vector<Complex> t_hat;
    for (const auto& h : h_hat_set) {
        v.push_back(update_phases(h));
        const double a = inner(h, v.back()).real();
        t_hat.emplace_back(a > 0.0 ? a / (a * a + c) : 0.0, 0.0);
    }
    auto s = recover_m_t(t_hat, cfg.P);
    return Design{s.m, std::move(s.t), std::move(v)};
}

inline Design initial_design(const SystemConfig& cfg, std::span<const CVector> h_hat_set, InitRule rule, Rng& rng) {
    Design d;
    d.m = 1.0;
    d.t.assign(static_cast<std::size_t>(cfg.K), Complex(std::sqrt(cfg.P / cfg.K), 0.0));
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    for (int k = 0; k < cfg.K; ++k) {
        if (rule == InitRule::cophase) {
            d.v.push_back(update_phases(h_hat_set[static_cast<std::size_t>(k)]));
        } else {
            CVector v(static_cast<std::size_t>(cfg.N));
            for (auto& z : v) z = std::polar(1.0, phase(rng));
            d.v.push_back(std::move(v));
        }
    }
    return d;
}

/// Alternating loop started from a given design. Each sweep computes lambda_k, co-phases v_k,
/// updates t_hat_k (paper: stationary point of the lambda-parameterized objective; exact:
/// t_exact), and recovers (m, t). Stops once the change metric drops to delta_stop.
inline SolveResult run_algorithm1_from(const SystemConfig& cfg, std::span<const CVector> h_hat_set,
                                       std::span<const double> eps_set, const SolverOptions& opt, Design start) {
    opt.validate();
    const auto in = detail::make_instance(cfg, h_hat_set, eps_set);
    require_design_shape(start, h_hat_set.size(), static_cast<std::size_t>(cfg.N));
    const std::size_t K = h_hat_set.size();
    const double root_n = std::sqrt(static_cast<double>(cfg.N));
    const double inf = std::numeric_limits<double>::infinity();

    SolveResult res;
    Design cur = std::move(start);
    std::vector<Complex> t_hat(K);
    for (std::size_t k = 0; k < K; ++k) t_hat[k] = cur.t_hat(k);
    double J = worst_case_objective(cur, h_hat_set, eps_set, cfg.noise_var);
    res.trace.initial_objective = J;

    for (int it = 0; it < opt.max_iters; ++it) {
        IterRecord rec;
        std::vector<Complex> next_t_hat = t_hat;
        std::vector<CVector> next_v = cur.v;

        for (std::size_t k = 0; k < K; ++k) {
            const CVector& h = h_hat_set[k];
            const double eps = eps_set[k];
            double lambda = eps > 0.0 ? lambda_worst(t_hat[k], h, cur.v[k], eps) : inf;

            CVector v = update_phases(h);
            if (opt.lambda_after_phase && eps > 0.0) lambda = lambda_worst(t_hat[k], h, v, eps);
            const Complex z = inner(h, v);
            const double a = std::abs(z);

            double tau = 0.0;
            if (opt.mode == SolverMode::exact) {
                tau = t_exact(a, eps * root_n, cfg.noise_var, cfg.P);
            } else if (!(eps > 0.0) || !(lambda > 0.0)) {
                tau = a > 0.0 ? a / (a * a + cfg.noise_var / cfg.P) : 0.0;
            } else {
                const double Q = std::norm(t_hat[k] * z - 1.0);
                tau = std::sqrt(t_mag_paper(Q, lambda, cfg.N, cfg.P, cfg.noise_var));
            }
            const Complex candidate = detail::align(tau, z);

            rec.lambda.push_back(lambda);
            rec.a.push_back(a);
            if (opt.safeguard && detail::sensor_objective(in, k, candidate, v) >
                                     detail::sensor_objective(in, k, t_hat[k], cur.v[k]))
                continue;
            next_t_hat[k] = candidate;
            next_v[k] = std::move(v);
        }

        Design next = detail::assemble(next_t_hat, next_v, cfg.P);
        double next_J = worst_case_objective(next, h_hat_set, eps_set, cfg.noise_var);
        if (opt.safeguard && next_J > J) {
            next = cur;
            next_t_hat = t_hat;
            next_J = J;
        }

        double change = (next.m - cur.m) * (next.m - cur.m);
        for (std::size_t k = 0; k < K; ++k) {
            change += std::norm(next.t[k] - cur.t[k]);
            for (std::size_t i = 0; i < next.v[k].size(); ++i) change += std::norm(next.v[k][i] - cur.v[k][i]);
        }

        rec.objective = next_J;
        rec.change = change;
        res.trace.iterations.push_back(std::move(rec));
        cur = std::move(next);
        t_hat = std::move(next_t_hat);
        J = next_J;
        if (change <= opt.delta_stop) {
            res.trace.converged = true;
            break;
        }
    }
    res.design = std::move(cur);
    return res;
}

inline SolveResult run_algorithm1(const SystemConfig& cfg, std::span<const CVector> h_hat_set,
                                  std::span<const double> eps_set, const SolverOptions& opt, Rng& rng) {
    detail::make_instance(cfg, h_hat_set, eps_set);
    return run_algorithm1_from(cfg, h_hat_set, eps_set, opt, initial_design(cfg, h_hat_set, opt.init_rule, rng));
}

struct MultiStartResult {
    Design design;
    IterTrace trace;
    double objective = 0.0;
    std::size_t best_start = 0;
    std::vector<double> start_objectives;  ///< random starts in order, then the warm start if enabled
};

/// Best of options.starts random starts (plus the non-robust warm start when enabled).
/// Start 0 replays the caller's stream; later starts get streams derived from it by index.
inline MultiStartResult multi_start(const SystemConfig& cfg, std::span<const CVector> h_hat_set,
                                    std::span<const double> eps_set, const SolverOptions& opt, Rng& rng) {
    opt.validate();
    Rng first = rng;
    const std::uint64_t base = rng();

    MultiStartResult best;
    bool have = false;
    auto consider = [&](SolveResult r) {
        const double J = worst_case_objective(r.design, h_hat_set, eps_set, cfg.noise_var);
        best.start_objectives.push_back(J);
        if (!have || J < best.objective) {
            have = true;
            best.objective = J;
            best.best_start = best.start_objectives.size() - 1;
            best.design = std::move(r.design);
            best.trace = std::move(r.trace);
        }
    };

    for (int s = 0; s < opt.starts; ++s) {
        if (s == 0) {
            consider(run_algorithm1(cfg, h_hat_set, eps_set, opt, first));
        } else {
            Rng stream(derive_seed(base, {static_cast<std::uint64_t>(s)}));
            consider(run_algorithm1(cfg, h_hat_set, eps_set, opt, stream));
        }
    }
    if (opt.include_nonrobust_start)
        consider(run_algorithm1_from(cfg, h_hat_set, eps_set, opt, nonrobust_design(cfg, h_hat_set)));
    return best;
}

}  // namespace aircomp
