/**
 * @file model.hpp
 * @brief Complex-vector primitives, channel synthesis, the bounded CSI-error
 *        model and the nominal (non-robust) MSE evaluators.
 *
 * Vector conventions used throughout the library:
 *  - a CVector is a column vector; inner(a, b) = sum_i conj(a_i) * b_i.
 *  - a row covector (e.g. h^H or a CSI error row) is stored as a plain CVector
 *    and applied to a column with apply_row(d, v) = sum_i d_i * v_i, i.e. no
 *    conjugation on application.
 */
#pragma once

#include <aircomp/error.hpp>

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace aircomp {

using Complex = std::complex<double>;

/// Random stream used by every stochastic operation. Never share one between threads.
using Rng = std::mt19937_64;

/// splitmix64 finalizer; stable across platforms.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives a child seed from a parent seed and an ordered list of coordinates.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> coords) noexcept {
    std::uint64_t s = mix64(seed);
    for (auto c : coords) s = mix64(s ^ mix64(c + 0x632be59bd9b4e019ULL));
    return s;
}

inline std::uint64_t hash_string(const std::string& s) noexcept {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline bool is_finite(Complex z) noexcept { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// Non-empty vector of finite complex entries. See the file comment for the
/// column/row conventions.
class CVector {
public:
    explicit CVector(std::size_t n) : data_(n) {
        if (n == 0) throw Error(ErrorCode::InvalidDimension, "CVector length must be >= 1");
    }

    explicit CVector(std::vector<Complex> entries) : data_(std::move(entries)) {
        if (data_.empty()) throw Error(ErrorCode::InvalidDimension, "CVector length must be >= 1");
        for (const auto& z : data_)
            if (!is_finite(z)) throw Error(ErrorCode::NonFinite, "CVector entry is not finite");
    }

    CVector(std::initializer_list<Complex> entries) : CVector(std::vector<Complex>(entries)) {}

    std::size_t size() const noexcept { return data_.size(); }
    Complex& operator[](std::size_t i) noexcept { return data_[i]; }
    const Complex& operator[](std::size_t i) const noexcept { return data_[i]; }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    std::span<const Complex> entries() const noexcept { return data_; }

    bool operator==(const CVector&) const = default;

private:
    std::vector<Complex> data_;
};

inline void require_same_size(const CVector& a, const CVector& b, const char* what) {
    if (a.size() != b.size())
        throw Error(ErrorCode::DimensionMismatch,
                    std::string(what) + ": lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
}

/// Hermitian inner product sum_i conj(a_i) b_i.
inline Complex inner(const CVector& a, const CVector& b) {
    require_same_size(a, b, "inner");
    Complex acc{};
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

/// Row covector applied to a column: sum_i d_i v_i.
inline Complex apply_row(const CVector& row, const CVector& v) {
    require_same_size(row, v, "apply_row");
    Complex acc{};
    for (std::size_t i = 0; i < row.size(); ++i) acc += row[i] * v[i];
    return acc;
}

inline double norm_sq(const CVector& a) noexcept {
    double acc = 0.0;
    for (const auto& z : a) acc += std::norm(z);
    return acc;
}

inline double norm(const CVector& a) noexcept { return std::sqrt(norm_sq(a)); }

/// Row representation h^H of a column h (entries conj(h_i)).
inline CVector as_row(const CVector& h) {
    CVector out(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) out[i] = std::conj(h[i]);
    return out;
}

/// Difference of the row representations, h^H - h_hat^H.
inline CVector row_difference(const CVector& h, const CVector& h_hat) {
    require_same_size(h, h_hat, "row_difference");
    CVector out(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) out[i] = std::conj(h[i]) - std::conj(h_hat[i]);
    return out;
}

enum class EvalMode { worst, realized };
enum class ErrorSampling { surface, interior };

struct SystemConfig {
    int K = 10;
    int N = 16;
    double P = 10.0;
    double noise_var = 1.0;
    double channel_var = 0.5;
    double s = 0.4;
    EvalMode eval_mode = EvalMode::worst;
    ErrorSampling error_sampling = ErrorSampling::surface;

    void validate() const {
        auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidConfig, m); };
        if (K < 1) fail("K must be >= 1");
        if (N < 1) fail("N must be >= 1");
        if (!std::isfinite(P) || P <= 0) fail("P must be finite and > 0");
        if (!std::isfinite(noise_var) || noise_var < 0) fail("noise_var must be finite and >= 0");
        if (!std::isfinite(channel_var) || channel_var <= 0) fail("channel_var must be finite and > 0");
        if (!std::isfinite(s) || s < 0) fail("s must be finite and >= 0");
    }

    bool operator==(const SystemConfig&) const = default;
};

/// One sensor's link: g (RIS -> receiver), r (sensor -> RIS), the true
/// cascaded channel h, its estimate h_hat and the uncertainty radius eps.
struct SensorChannel {
    CVector g;
    CVector r;
    CVector h;
    CVector h_hat;
    double eps = 0.0;
};

using ChannelInstance = std::vector<SensorChannel>;

struct Design {
    double m = 0.0;
    std::vector<Complex> t;
    std::vector<CVector> v;

    std::size_t sensors() const noexcept { return t.size(); }
    Complex t_hat(std::size_t k) const noexcept { return m * t[k]; }

    double power() const noexcept {
        double p = 0.0;
        for (const auto& tk : t) p += std::norm(tk);
        return p;
    }
};

inline CVector sample_rayleigh_vector(int n, double variance, Rng& rng) {
    if (n < 1) throw Error(ErrorCode::InvalidDimension, "sample_rayleigh_vector: n must be >= 1");
    if (!(variance >= 0)) throw Error(ErrorCode::InvalidArgument, "sample_rayleigh_vector: variance must be >= 0");
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double scale = std::sqrt(variance / 2.0);
    CVector out(static_cast<std::size_t>(n));
    for (auto& z : out) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        z = Complex(scale * re, scale * im);
    }
    return out;
}

/// Cascaded channel h with h^H = g^H diag(r), i.e. conj(h_i) = conj(g_i) r_i.
inline CVector cascade_channel(const CVector& g, const CVector& r) {
    require_same_size(g, r, "cascade_channel");
    CVector h(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) h[i] = g[i] * std::conj(r[i]);
    return h;
}

inline double epsilon_from_coefficient(double s, const CVector& h) noexcept { return s * norm(h); }

/// Random row error with norm eps (surface) or uniform in the complex eps-ball (interior).
inline CVector sample_bounded_error(int n, double eps, ErrorSampling mode, Rng& rng) {
    if (n < 1) throw Error(ErrorCode::InvalidDimension, "sample_bounded_error: n must be >= 1");
    CVector out(static_cast<std::size_t>(n));
    if (eps <= 0.0) return out;
    std::normal_distribution<double> gauss(0.0, 1.0);
    double len = 0.0;
    do {
        for (auto& z : out) z = Complex(gauss(rng), gauss(rng));
        len = norm(out);
    } while (len == 0.0);
    double radius = eps;
    if (mode == ErrorSampling::interior) {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        radius *= std::pow(unif(rng), 1.0 / (2.0 * n));
    }
    for (auto& z : out) z *= radius / len;
    return out;
}

/// Estimate h_hat with h_hat^H = h^H - delta_row.
inline CVector apply_error(const CVector& h, const CVector& delta_row) {
    require_same_size(h, delta_row, "apply_error");
    CVector out(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) out[i] = std::conj(std::conj(h[i]) - delta_row[i]);
    return out;
}

inline void require_design_shape(const Design& d, std::size_t K, std::size_t N) {
    if (d.t.size() != K || d.v.size() != K)
        throw Error(ErrorCode::DimensionMismatch, "design has " + std::to_string(d.t.size()) + " scalers for " +
                                                      std::to_string(K) + " sensors");
    for (const auto& vk : d.v)
        if (vk.size() != N) throw Error(ErrorCode::DimensionMismatch, "RIS vector length mismatch");
}

/// Closed-form MSE sum_k |m h_k^H v_k t_k - 1|^2 + noise_var m^2 for the channels actually applied.
inline double nominal_mse(const Design& d, std::span<const CVector> channels, double noise_var) {
    if (channels.empty()) throw Error(ErrorCode::InvalidDimension, "no channels");
    require_design_shape(d, channels.size(), channels.front().size());
    double acc = 0.0;
    for (std::size_t k = 0; k < channels.size(); ++k)
        acc += std::norm(d.m * inner(channels[k], d.v[k]) * d.t[k] - 1.0);
    return acc + noise_var * d.m * d.m;
}

struct MseEstimate {
    double mean = 0.0;
    double sample_std = 0.0;
    double std_error = 0.0;
};

/// Monte Carlo estimate of E|y - sum_k x_k|^2 with x_k ~ N(0, 1) real and n ~ CN(0, noise_var).
inline MseEstimate empirical_mse(const Design& d, std::span<const CVector> channels, double noise_var, int trials,
                                 Rng& rng) {
    if (trials < 1) throw Error(ErrorCode::InvalidArgument, "empirical_mse: trials must be >= 1");
    if (channels.empty()) throw Error(ErrorCode::InvalidDimension, "no channels");
    require_design_shape(d, channels.size(), channels.front().size());

    std::vector<Complex> gain(channels.size());
    for (std::size_t k = 0; k < channels.size(); ++k) gain[k] = inner(channels[k], d.v[k]) * d.t[k];

    std::normal_distribution<double> gauss(0.0, 1.0);
    const double noise_scale = std::sqrt(noise_var / 2.0);
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < trials; ++i) {
        Complex y{};
        double target = 0.0;
        for (std::size_t k = 0; k < gain.size(); ++k) {
            const double x = gauss(rng);
            y += gain[k] * x;
            target += x;
        }
        const double nre = gauss(rng);
        const double nim = gauss(rng);
        y = d.m * (y + noise_scale * Complex(nre, nim));
        const double e = std::norm(y - target);
        sum += e;
        sum_sq += e * e;
    }
    MseEstimate out;
    out.mean = sum / trials;
    const double var = trials > 1 ? std::max(0.0, (sum_sq - trials * out.mean * out.mean) / (trials - 1)) : 0.0;
    out.sample_std = std::sqrt(var);
    out.std_error = out.sample_std / std::sqrt(static_cast<double>(trials));
    return out;
}

/// Draws g_k, r_k ~ CN(0, channel_var), the true error on the eps_k = s ||h_k|| sphere/ball,
/// and the resulting estimate, for every sensor of the configuration.
inline ChannelInstance synthesize_channels(const SystemConfig& cfg, Rng& rng) {
    ChannelInstance out;
    out.reserve(static_cast<std::size_t>(cfg.K));
    for (int k = 0; k < cfg.K; ++k) {
        CVector g = sample_rayleigh_vector(cfg.N, cfg.channel_var, rng);
        CVector r = sample_rayleigh_vector(cfg.N, cfg.channel_var, rng);
        CVector h = cascade_channel(g, r);
        const double eps = epsilon_from_coefficient(cfg.s, h);
        CVector delta = sample_bounded_error(cfg.N, eps, cfg.error_sampling, rng);
        CVector h_hat = apply_error(h, delta);
        out.push_back(SensorChannel{std::move(g), std::move(r), std::move(h), std::move(h_hat), eps});
    }
    return out;
}

}  // namespace aircomp
