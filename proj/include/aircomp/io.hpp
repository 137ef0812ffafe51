/**
 * @file io.hpp
 * @brief Run configuration schema (strict JSON), results CSV, SVG plots and the
 *        solve output document.
 */
#pragma once

#include <aircomp/experiments.hpp>
#include <aircomp/model.hpp>
#include <aircomp/optimizer.hpp>
#include <aircomp/worst_case.hpp>

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace aircomp {

using json = nlohmann::json;

struct InlineChannel {
    CVector h_hat;
    double eps = 0.0;

    bool operator==(const InlineChannel&) const = default;
};

/// Sweep selections; empty values fall back to the kind's default grid.
struct SweepSettings {
    std::vector<double> values;
    int trials = 200;
    std::vector<Scheme> schemes{Scheme::multistart, Scheme::nonrobust};
    std::vector<double> s_values{0.4, 0.6};
    double snr_db = 10.0;

    bool operator==(const SweepSettings&) const = default;
};

struct OutputPaths {
    std::string csv;
    std::string plot;

    bool operator==(const OutputPaths&) const = default;
};

struct RunConfig {
    SystemConfig system;
    SolverOptions solver;
    SweepSettings sweep;
    std::optional<std::vector<InlineChannel>> channels;
    std::uint64_t master_seed = 1;
    OutputPaths output;

    bool operator==(const RunConfig&) const = default;
};

namespace detail {

[[noreturn]] inline void config_error(const std::string& m) { throw Error(ErrorCode::InvalidConfig, m); }

inline void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) config_error(where + " must be an object");
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || item.key() == a;
        if (!ok) config_error("unknown key '" + where + "." + item.key() + "'");
    }
}

inline double get_real(const json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (!v.is_number()) config_error("'" + key + "' must be a number");
    return v.get<double>();
}

inline int get_int(const json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (!v.is_number_integer()) config_error("'" + key + "' must be an integer");
    const auto x = v.get<std::int64_t>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) config_error("'" + key + "' out of range");
    return static_cast<int>(x);
}

inline bool get_bool(const json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (!v.is_boolean()) config_error("'" + key + "' must be a boolean");
    return v.get<bool>();
}

inline std::string get_string(const json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (!v.is_string()) config_error("'" + key + "' must be a string");
    return v.get<std::string>();
}

inline std::vector<double> get_reals(const json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (!v.is_array()) config_error("'" + key + "' must be an array");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) config_error("'" + key + "' entries must be numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

inline CVector parse_complex_array(const json& j) {
    if (!j.is_array() || j.empty()) config_error("complex vector must be a non-empty array of [re, im] pairs");
    std::vector<Complex> out;
    for (const auto& p : j) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            config_error("complex entries must be [re, im] pairs");
        out.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    try {
        return CVector(std::move(out));
    } catch (const Error& e) {
        config_error(e.what());
    }
}

inline json complex_array(std::span<const Complex> z) {
    json out = json::array();
    for (const auto& c : z) out.push_back({c.real(), c.imag()});
    return out;
}

inline double finite_or_throw(double x, const char* key) {
    if (!std::isfinite(x)) config_error(std::string("'") + key + "' must be finite");
    return x;
}

}  // namespace detail

inline const char* to_string(SolverMode m) noexcept { return m == SolverMode::paper ? "paper" : "exact"; }
inline const char* to_string(InitRule r) noexcept { return r == InitRule::cophase ? "cophase" : "random_phase"; }
inline const char* to_string(EvalMode m) noexcept { return m == EvalMode::worst ? "worst" : "realized"; }
inline const char* to_string(ErrorSampling m) noexcept { return m == ErrorSampling::surface ? "surface" : "interior"; }

inline SystemConfig parse_system(const json& j) {
    using namespace detail;
    reject_unknown(j, "system", {"K", "N", "P", "noise_var", "channel_var", "s", "eval_mode", "error_sampling"});
    SystemConfig c;
    if (j.contains("K")) c.K = get_int(j, "K");
    if (j.contains("N")) c.N = get_int(j, "N");
    if (j.contains("P")) c.P = get_real(j, "P");
    if (j.contains("noise_var")) c.noise_var = get_real(j, "noise_var");
    if (j.contains("channel_var")) c.channel_var = get_real(j, "channel_var");
    if (j.contains("s")) c.s = get_real(j, "s");
    if (j.contains("eval_mode")) {
        const auto m = get_string(j, "eval_mode");
        if (m == "worst") c.eval_mode = EvalMode::worst;
        else if (m == "realized") c.eval_mode = EvalMode::realized;
        else config_error("eval_mode must be 'worst' or 'realized'");
    }
    if (j.contains("error_sampling")) {
        const auto m = get_string(j, "error_sampling");
        if (m == "surface") c.error_sampling = ErrorSampling::surface;
        else if (m == "interior") c.error_sampling = ErrorSampling::interior;
        else config_error("error_sampling must be 'surface' or 'interior'");
    }
    c.validate();
    return c;
}

inline SolverOptions parse_solver(const json& j) {
    using namespace detail;
    reject_unknown(j, "solver", {"mode", "delta_stop", "max_iters", "safeguard", "starts", "include_nonrobust_start",
                                 "init_rule", "lambda_after_phase"});
    SolverOptions o;
    if (j.contains("mode")) {
        const auto m = get_string(j, "mode");
        if (m == "paper") o.mode = SolverMode::paper;
        else if (m == "exact") o.mode = SolverMode::exact;
        else config_error("mode must be 'paper' or 'exact'");
    }
    if (j.contains("delta_stop")) o.delta_stop = get_real(j, "delta_stop");
    if (j.contains("max_iters")) o.max_iters = get_int(j, "max_iters");
    if (j.contains("safeguard")) o.safeguard = get_bool(j, "safeguard");
    if (j.contains("starts")) o.starts = get_int(j, "starts");
    if (j.contains("include_nonrobust_start")) o.include_nonrobust_start = get_bool(j, "include_nonrobust_start");
    if (j.contains("init_rule")) {
        const auto r = get_string(j, "init_rule");
        if (r == "random_phase") o.init_rule = InitRule::random_phase;
        else if (r == "cophase") o.init_rule = InitRule::cophase;
        else config_error("init_rule must be 'random_phase' or 'cophase'");
    }
    if (j.contains("lambda_after_phase")) o.lambda_after_phase = get_bool(j, "lambda_after_phase");
    o.validate();
    return o;
}

inline SweepSettings parse_sweep(const json& j) {
    using namespace detail;
    reject_unknown(j, "sweep", {"values", "trials", "schemes", "s_values", "snr_db"});
    SweepSettings s;
    if (j.contains("values")) s.values = get_reals(j, "values");
    if (j.contains("trials")) s.trials = get_int(j, "trials");
    if (j.contains("schemes")) {
        const auto& arr = j.at("schemes");
        if (!arr.is_array()) config_error("'schemes' must be an array");
        s.schemes.clear();
        for (const auto& x : arr) {
            if (!x.is_string()) config_error("'schemes' entries must be strings");
            s.schemes.push_back(parse_scheme(x.get<std::string>()));
        }
    }
    if (j.contains("s_values")) s.s_values = get_reals(j, "s_values");
    if (j.contains("snr_db")) s.snr_db = finite_or_throw(get_real(j, "snr_db"), "snr_db");
    if (s.trials < 1) config_error("trials must be >= 1");
    if (s.schemes.empty()) config_error("schemes must be non-empty");
    if (s.s_values.empty()) config_error("s_values must be non-empty");
    return s;
}

inline RunConfig parse_run_config(const json& j) {
    using namespace detail;
    reject_unknown(j, "config", {"system", "solver", "sweep", "channels", "master_seed", "output"});
    RunConfig c;
    try {
        if (j.contains("system")) c.system = parse_system(j.at("system"));
        if (j.contains("solver")) c.solver = parse_solver(j.at("solver"));
        if (j.contains("sweep")) c.sweep = parse_sweep(j.at("sweep"));
        if (j.contains("master_seed")) {
            const auto& s = j.at("master_seed");
            if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0))
                config_error("'master_seed' must be a non-negative integer");
            c.master_seed = s.get<std::uint64_t>();
        }
        if (j.contains("output")) {
            const auto& o = j.at("output");
            reject_unknown(o, "output", {"csv", "plot"});
            if (o.contains("csv")) c.output.csv = get_string(o, "csv");
            if (o.contains("plot")) c.output.plot = get_string(o, "plot");
        }
        if (j.contains("channels")) {
            const auto& arr = j.at("channels");
            if (!arr.is_array() || arr.empty()) config_error("'channels' must be a non-empty array");
            std::vector<InlineChannel> chans;
            for (const auto& item : arr) {
                reject_unknown(item, "channels[]", {"h_hat", "eps"});
                if (!item.contains("h_hat") || !item.contains("eps")) config_error("each channel needs 'h_hat' and 'eps'");
                const double eps = get_real(item, "eps");
                if (!(eps >= 0.0) || !std::isfinite(eps)) config_error("'eps' must be finite and >= 0");
                chans.push_back(InlineChannel{parse_complex_array(item.at("h_hat")), eps});
            }
            if (chans.size() != static_cast<std::size_t>(c.system.K))
                config_error("'channels' has " + std::to_string(chans.size()) + " entries but K = " +
                             std::to_string(c.system.K));
            for (const auto& ch : chans)
                if (ch.h_hat.size() != static_cast<std::size_t>(c.system.N))
                    config_error("channel length differs from N = " + std::to_string(c.system.N));
            c.channels = std::move(chans);
        }
    } catch (const json::exception& e) {
        config_error(e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidConfig) throw;
        config_error(e.what());
    }
    return c;
}

inline RunConfig parse_run_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        detail::config_error(std::string("malformed JSON: ") + e.what());
    }
    return parse_run_config(j);
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) detail::config_error("cannot read config '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config_text(ss.str());
}

inline json to_json(const RunConfig& c) {
    json sys = {{"K", c.system.K},
                {"N", c.system.N},
                {"P", c.system.P},
                {"noise_var", c.system.noise_var},
                {"channel_var", c.system.channel_var},
                {"s", c.system.s},
                {"eval_mode", to_string(c.system.eval_mode)},
                {"error_sampling", to_string(c.system.error_sampling)}};
    json solver = {{"mode", to_string(c.solver.mode)},
                   {"delta_stop", c.solver.delta_stop},
                   {"max_iters", c.solver.max_iters},
                   {"safeguard", c.solver.safeguard},
                   {"starts", c.solver.starts},
                   {"include_nonrobust_start", c.solver.include_nonrobust_start},
                   {"init_rule", to_string(c.solver.init_rule)},
                   {"lambda_after_phase", c.solver.lambda_after_phase}};
    json schemes = json::array();
    for (auto s : c.sweep.schemes) schemes.push_back(to_string(s));
    json sweep = {{"values", c.sweep.values},
                  {"trials", c.sweep.trials},
                  {"schemes", schemes},
                  {"s_values", c.sweep.s_values},
                  {"snr_db", c.sweep.snr_db}};
    json out = {{"system", sys}, {"solver", solver}, {"sweep", sweep}, {"master_seed", c.master_seed}};
    json o = json::object();
    if (!c.output.csv.empty()) o["csv"] = c.output.csv;
    if (!c.output.plot.empty()) o["plot"] = c.output.plot;
    if (!o.empty()) out["output"] = o;
    if (c.channels) {
        json arr = json::array();
        for (const auto& ch : *c.channels) arr.push_back({{"h_hat", detail::complex_array(ch.h_hat.entries())}, {"eps", ch.eps}});
        out["channels"] = arr;
    }
    return out;
}

inline std::vector<double> default_sweep_values(SweepKind kind) {
    switch (kind) {
        case SweepKind::snr: return fig2_spec().values;
        case SweepKind::n: return fig3_spec().values;
        case SweepKind::k: return fig4_spec().values;
    }
    return {};
}

inline SweepSpec make_sweep_spec(const RunConfig& c, SweepKind kind) {
    SweepSpec spec;
    spec.kind = kind;
    spec.values = c.sweep.values.empty() ? default_sweep_values(kind) : c.sweep.values;
    spec.trials = c.sweep.trials;
    spec.schemes = c.sweep.schemes;
    spec.s_values = c.sweep.s_values;
    spec.snr_db = c.sweep.snr_db;
    spec.base = c.system;
    spec.options = c.solver;
    spec.master_seed = c.master_seed;
    try {
        spec.validate();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidConfig) throw;
        detail::config_error(e.what());
    }
    return spec;
}

/// Writes to a sibling temporary file and renames it into place, so failures leave no partial output.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, "cannot open '" + tmp.string() + "' for writing");
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw Error(ErrorCode::Io, "failed writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorCode::Io, "cannot move output into '" + path.string() + "'");
    }
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline constexpr const char* kResultsHeader = "kind,value,scheme,nmse_mean,nmse_std,trials,mean_iters";

inline std::string results_csv(const std::vector<AggregateRecord>& rows) {
    std::string out = kResultsHeader;
    out += '\n';
    for (const auto& r : rows) {
        out += csv_field(r.kind) + ',' + format_real(r.value) + ',' + csv_field(r.scheme) + ',' +
               format_real(r.nmse_mean) + ',' + format_real(r.nmse_std) + ',' + std::to_string(r.trials) + ',' +
               format_real(r.mean_iters) + '\n';
    }
    return out;
}

/// Line plot of NMSE (log10 axis) against the sweep value, one polyline per scheme label.
inline std::string results_svg(const std::vector<AggregateRecord>& rows, const std::string& x_label) {
    constexpr double W = 720, H = 480, L = 80, R = 200, T = 30, B = 60;
    std::map<std::string, std::vector<std::pair<double, double>>> series;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    double floor_val = std::numeric_limits<double>::infinity();
    for (const auto& r : rows)
        if (r.nmse_mean > 0.0) floor_val = std::min(floor_val, r.nmse_mean);
    if (!std::isfinite(floor_val)) floor_val = 1e-12;
    for (const auto& r : rows) {
        const double y = std::log10(std::max(r.nmse_mean, floor_val));
        series[r.scheme].emplace_back(r.value, y);
        xmin = std::min(xmin, r.value);
        xmax = std::max(xmax, r.value);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    if (rows.empty()) xmin = 0, xmax = 1, ymin = -1, ymax = 0;
    ymin = std::floor(ymin);
    ymax = std::ceil(ymax);
    if (ymax <= ymin) ymax = ymin + 1;
    if (xmax <= xmin) xmax = xmin + 1;
    auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double y) { return T + (ymax - y) / (ymax - ymin) * (H - T - B); };
    auto num = [](double v) {
        std::ostringstream s;
        s.precision(6);
        s << v;
        return s.str();
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
        << ' ' << H << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<g stroke=\"#999\" stroke-width=\"0.5\" font-family=\"sans-serif\" font-size=\"11\">\n";
    for (double e = ymin; e <= ymax + 1e-9; e += 1.0) {
        svg << "<line x1=\"" << L << "\" y1=\"" << num(py(e)) << "\" x2=\"" << W - R << "\" y2=\"" << num(py(e)) << "\"/>\n";
        svg << "<text stroke=\"none\" x=\"" << L - 8 << "\" y=\"" << num(py(e) + 4)
            << "\" text-anchor=\"end\">1e" << static_cast<int>(e) << "</text>\n";
    }
    std::set<double> xs;
    for (const auto& r : rows) xs.insert(r.value);
    for (double x : xs) {
        svg << "<line x1=\"" << num(px(x)) << "\" y1=\"" << T << "\" x2=\"" << num(px(x)) << "\" y2=\"" << H - B << "\"/>\n";
        svg << "<text stroke=\"none\" x=\"" << num(px(x)) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">"
            << format_real(x) << "</text>\n";
    }
    svg << "</g>\n";
    svg << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label << "</text>\n";
    svg << "<text x=\"18\" y=\"" << (T + H - B) / 2 << "\" transform=\"rotate(-90 18 " << (T + H - B) / 2
        << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">NMSE</text>\n";

    static constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};
    std::size_t idx = 0;
    for (const auto& [label, pts] : series) {
        const char* color = palette[idx % std::size(palette)];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const auto& [x, y] : pts) svg << num(px(x)) << ',' << num(py(y)) << ' ';
        svg << "\"/>\n";
        for (const auto& [x, y] : pts)
            svg << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        const double ly = T + 10 + 20.0 * static_cast<double>(idx);
        svg << "<line x1=\"" << W - R + 15 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 40 << "\" y2=\"" << ly
            << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << W - R + 46 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"11\">"
            << label << "</text>\n";
        ++idx;
    }
    svg << "</svg>\n";
    return svg.str();
}

/// Phase in (-pi, pi].
inline double phase_of(Complex z) {
    const double p = std::arg(z);
    return p <= -std::numbers::pi ? std::numbers::pi : p;
}

/// Solve output: design, certificate and trace summary.
inline json design_document(const Design& d, std::span<const CVector> h_hat_set, std::span<const double> eps_set,
                            double noise_var, const IterTrace& trace) {
    const auto cert = worst_case_certificate(d, h_hat_set, eps_set, noise_var);
    json phases = json::array();
    for (const auto& v : d.v) {
        json row = json::array();
        for (const auto& z : v) row.push_back(phase_of(z));
        phases.push_back(row);
    }
    json lambdas = json::array();
    for (double l : cert.lambda) lambdas.push_back(std::isfinite(l) ? json(l) : json(nullptr));
    return json{{"m", d.m},
                {"t", detail::complex_array(d.t)},
                {"v_phases", phases},
                {"lambda", lambdas},
                {"worst_case_term", cert.term},
                {"objective", cert.total},
                {"power", d.power()},
                {"eps", std::vector<double>(eps_set.begin(), eps_set.end())},
                {"trace_length", trace.size()},
                {"converged", trace.converged}};
}

}  // namespace aircomp
