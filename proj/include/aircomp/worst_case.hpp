/**
 * @file worst_case.hpp
 * @brief Closed-form worst-case CSI perturbation over the eps-ball, its KKT
 *        multiplier and worst-case MSE, plus independent brute-force checks.
 *
 * For a fixed sensor with effective scalar t_hat, estimate h_hat and RIS
 * vector v, the inner problem is
 *
 *     max_{||D|| <= eps} | t_hat (h_hat^H + D) v - 1 |^2 .
 *
 * Writing rho = t_hat h_hat^H v - 1, the objective only sees D through the
 * scalar D v, so the maximizer is rank-one along v^H:
 *
 *     D* = (eps / ||v||) u v^H,   u = conj(t_hat) rho / |t_hat rho|,
 *
 * with value (|rho| + |t_hat| eps ||v||)^2 and multiplier
 * lambda = |t_hat|^2 ||v||^2 + ||v|| |t_hat| |rho| / eps. Equivalently
 * D* = conj(t_hat) rho v^H / (lambda - |t_hat|^2 ||v||^2); the conjugate on
 * t_hat matters whenever t_hat is complex. No N x N matrix is ever formed.
 */
#pragma once

#include <aircomp/model.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace aircomp {

/// rho = t_hat * h_hat^H v - 1
inline Complex residual(Complex t_hat, const CVector& h_hat, const CVector& v) {
    return t_hat * inner(h_hat, v) - 1.0;
}

/// KKT multiplier on the maximizer branch (lambda >= |t_hat|^2 N).
inline double lambda_worst(Complex t_hat, const CVector& h_hat, const CVector& v, double eps) {
    if (!(eps > 0.0)) throw Error(ErrorCode::NoUncertainty, "lambda_worst requires eps > 0");
    const double vn = norm(v);
    const double at = std::abs(t_hat);
    return at * at * vn * vn + vn * at * std::abs(residual(t_hat, h_hat, v)) / eps;
}

/// Worst-case row perturbation on the eps-sphere. For rho = 0 the phase is fixed by
/// conj(t_hat)/|t_hat|; for t_hat = 0 the objective ignores D and eps/||v|| v^H is returned.
inline CVector delta_worst(Complex t_hat, const CVector& h_hat, const CVector& v, double eps) {
    require_same_size(h_hat, v, "delta_worst");
    CVector out(v.size());
    if (eps <= 0.0) return out;

    const Complex rho = residual(t_hat, h_hat, v);
    const Complex w = std::conj(t_hat) * rho;
    Complex u{1.0, 0.0};
    if (std::abs(w) > 0.0)
        u = w / std::abs(w);
    else if (std::abs(t_hat) > 0.0)
        u = std::conj(t_hat) / std::abs(t_hat);

    const Complex alpha = (eps / norm(v)) * u;
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = alpha * std::conj(v[i]);
    return out;
}

/// (|rho| + |t_hat| eps ||v||)^2
inline double worst_case_term(Complex t_hat, const CVector& h_hat, const CVector& v, double eps) {
    const double a = std::abs(residual(t_hat, h_hat, v)) + std::abs(t_hat) * std::max(eps, 0.0) * norm(v);
    return a * a;
}

/// Closed-form ratio form |rho / (1 - |t_hat|^2 ||v||^2 / lambda)|^2 of the same value.
inline double worst_case_term_from_lambda(Complex t_hat, const CVector& h_hat, const CVector& v, double lambda) {
    const double vn2 = norm_sq(v);
    return std::norm(residual(t_hat, h_hat, v) / (1.0 - std::norm(t_hat) * vn2 / lambda));
}

inline void require_instance_shape(const Design& d, std::span<const CVector> h_hat_set, std::span<const double> eps_set) {
    if (h_hat_set.empty()) throw Error(ErrorCode::InvalidDimension, "no sensors");
    if (eps_set.size() != h_hat_set.size())
        throw Error(ErrorCode::DimensionMismatch, "eps_set and h_hat_set sizes differ");
    require_design_shape(d, h_hat_set.size(), h_hat_set.front().size());
}

inline double worst_case_objective(const Design& d, std::span<const CVector> h_hat_set,
                                   std::span<const double> eps_set, double noise_var) {
    require_instance_shape(d, h_hat_set, eps_set);
    double acc = 0.0;
    for (std::size_t k = 0; k < h_hat_set.size(); ++k)
        acc += worst_case_term(d.t_hat(k), h_hat_set[k], d.v[k], eps_set[k]);
    return acc + noise_var * d.m * d.m;
}

struct WorstCaseCert {
    std::vector<double> lambda;  ///< +inf where eps_k = 0 (constraint forces D = 0)
    std::vector<CVector> delta;
    std::vector<double> term;
    double total = 0.0;
};

inline WorstCaseCert worst_case_certificate(const Design& d, std::span<const CVector> h_hat_set,
                                            std::span<const double> eps_set, double noise_var) {
    require_instance_shape(d, h_hat_set, eps_set);
    WorstCaseCert cert;
    for (std::size_t k = 0; k < h_hat_set.size(); ++k) {
        const Complex th = d.t_hat(k);
        const double eps = eps_set[k];
        cert.lambda.push_back(eps > 0.0 ? lambda_worst(th, h_hat_set[k], d.v[k], eps)
                                        : std::numeric_limits<double>::infinity());
        cert.delta.push_back(delta_worst(th, h_hat_set[k], d.v[k], eps));
        cert.term.push_back(worst_case_term(th, h_hat_set[k], d.v[k], eps));
        cert.total += cert.term.back();
    }
    cert.total += noise_var * d.m * d.m;
    return cert;
}

/// sum_k |m (h_hat_k^H + D_k) v_k t_k - 1|^2 + noise_var m^2. When eps_set is given each
/// ||D_k|| is checked against it.
inline double mse_at_error(const Design& d, std::span<const CVector> h_hat_set, std::span<const CVector> delta_set,
                           double noise_var, std::optional<std::span<const double>> eps_set = std::nullopt) {
    if (h_hat_set.empty()) throw Error(ErrorCode::InvalidDimension, "no sensors");
    if (delta_set.size() != h_hat_set.size())
        throw Error(ErrorCode::DimensionMismatch, "delta_set and h_hat_set sizes differ");
    require_design_shape(d, h_hat_set.size(), h_hat_set.front().size());
    if (eps_set && eps_set->size() != h_hat_set.size())
        throw Error(ErrorCode::DimensionMismatch, "eps_set and h_hat_set sizes differ");

    double acc = 0.0;
    for (std::size_t k = 0; k < h_hat_set.size(); ++k) {
        if (eps_set) {
            const double bound = (*eps_set)[k];
            if (norm(delta_set[k]) > bound * (1.0 + 1e-12) + 1e-300)
                throw Error(ErrorCode::PerturbationOutOfBall, "sensor " + std::to_string(k));
        }
        const Complex gain = inner(h_hat_set[k], d.v[k]) + apply_row(delta_set[k], d.v[k]);
        acc += std::norm(d.m * gain * d.t[k] - 1.0);
    }
    return acc + noise_var * d.m * d.m;
}

/// Objective of one sensor at an arbitrary perturbation: |t_hat (h_hat^H + D) v - 1|^2.
inline double perturbed_term(Complex t_hat, const CVector& h_hat, const CVector& v, const CVector& delta) {
    return std::norm(t_hat * (inner(h_hat, v) + apply_row(delta, v)) - 1.0);
}

/// Independent search for the inner maximum: best of n_samples random points on the
/// eps-sphere, then refine_steps of projected gradient ascent from the best one.
inline double brute_force_worst_case(Complex t_hat, const CVector& h_hat, const CVector& v, double eps,
                                     int n_samples, int refine_steps, Rng& rng) {
    if (n_samples < 1) throw Error(ErrorCode::InvalidArgument, "brute_force_worst_case: n_samples must be >= 1");
    require_same_size(h_hat, v, "brute_force_worst_case");
    const Complex rho = residual(t_hat, h_hat, v);
    if (eps <= 0.0) return std::norm(rho);

    const int n = static_cast<int>(v.size());
    double best = -1.0;
    CVector best_delta(v.size());
    for (int s = 0; s < n_samples; ++s) {
        CVector d = sample_bounded_error(n, eps, ErrorSampling::surface, rng);
        const double f = std::norm(rho + t_hat * apply_row(d, v));
        if (f > best) {
            best = f;
            best_delta = std::move(d);
        }
    }

    const double curvature = std::norm(t_hat) * norm_sq(v);
    if (refine_steps > 0 && curvature > 0.0) {
        CVector d = best_delta;
        const double step = 1.0 / curvature;
        for (int it = 0; it < refine_steps; ++it) {
            // ascent direction: conj(t_hat) (rho + t_hat D v) v^H
            const Complex coef = std::conj(t_hat) * (rho + t_hat * apply_row(d, v));
            for (std::size_t i = 0; i < v.size(); ++i) d[i] += step * coef * std::conj(v[i]);
            const double len = norm(d);
            if (len == 0.0) break;
            for (auto& z : d) z *= eps / len;
            best = std::max(best, std::norm(rho + t_hat * apply_row(d, v)));
        }
    }
    return best;
}

/// L(D, lambda) = -|t_hat (h_hat^H + D) v - 1|^2 + lambda (||D||^2 - eps^2)
inline double lagrangian(Complex t_hat, const CVector& h_hat, const CVector& v, double eps, const CVector& delta,
                         double lambda) {
    return -perturbed_term(t_hat, h_hat, v, delta) + lambda * (norm_sq(delta) - eps * eps);
}

/// Wirtinger gradient dL/dD^*:
/// -|t_hat|^2 h_hat^H v v^H + conj(t_hat) v^H - |t_hat|^2 (D v) v^H + lambda D.
inline CVector lagrangian_gradient(Complex t_hat, const CVector& h_hat, const CVector& v, const CVector& delta,
                                   double lambda) {
    require_same_size(h_hat, v, "lagrangian_gradient");
    require_same_size(delta, v, "lagrangian_gradient");
    const double tt = std::norm(t_hat);
    const Complex coef = -tt * inner(h_hat, v) + std::conj(t_hat) - tt * apply_row(delta, v);
    CVector g(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) g[i] = coef * std::conj(v[i]) + lambda * delta[i];
    return g;
}

/// ||dL/dD^*|| + |lambda (||D||^2 - eps^2)|
inline double kkt_residual(Complex t_hat, const CVector& h_hat, const CVector& v, double eps, const CVector& delta,
                           double lambda) {
    const double stationarity = norm(lagrangian_gradient(t_hat, h_hat, v, delta, lambda));
    const double slackness = std::abs(lambda * (norm_sq(delta) - eps * eps));
    return stationarity + slackness;
}

}  // namespace aircomp
