// aircomp: command-line front end for the robust RIS-aided AirComp designer.
//
//   aircomp solve  --config <path> --out <path>
//   aircomp sweep  --kind snr|n|k --config <path> --out <csv> [--plot <svg>]
//   aircomp verify --suite worstcase|kkt|oracle|monotone --trials <n> --seed <u64>
//
// Exit codes: 0 ok, 1 config, 2 solver, 3 I/O, 4 verification failure.

#include <aircomp/aircomp.hpp>

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <string>

namespace {

enum Exit : int { kOk = 0, kConfig = 1, kSolver = 2, kIo = 3, kVerify = 4 };

int exit_for(const aircomp::Error& e) {
    switch (e.code()) {
        case aircomp::ErrorCode::InvalidConfig: return kConfig;
        case aircomp::ErrorCode::Io: return kIo;
        default: return kSolver;
    }
}

int cmd_solve(const std::string& config_path, const std::string& out_path) {
    using namespace aircomp;
    RunConfig cfg;
    try {
        cfg = load_run_config(config_path);
    } catch (const Error& e) {
        std::cerr << "aircomp solve: " << e.what() << '\n';
        return kConfig;
    }

    std::string doc;
    try {
        std::vector<CVector> h_hat;
        std::vector<double> eps;
        if (cfg.channels) {
            for (const auto& c : *cfg.channels) {
                h_hat.push_back(c.h_hat);
                eps.push_back(c.eps);
            }
        } else {
            Rng channel_rng(derive_seed(cfg.master_seed, {0}));
            for (auto& c : synthesize_channels(cfg.system, channel_rng)) {
                h_hat.push_back(std::move(c.h_hat));
                eps.push_back(c.eps);
            }
        }
        Rng solver_rng(derive_seed(cfg.master_seed, {1}));
        const auto res = multi_start(cfg.system, h_hat, eps, cfg.solver, solver_rng);
        doc = design_document(res.design, h_hat, eps, cfg.system.noise_var, res.trace).dump(2) + "\n";
    } catch (const Error& e) {
        std::cerr << "aircomp solve: " << e.what() << '\n';
        return exit_for(e);
    }

    try {
        write_file_atomic(out_path, doc);
    } catch (const Error& e) {
        std::cerr << "aircomp solve: " << e.what() << '\n';
        return kIo;
    }
    return kOk;
}

int cmd_sweep(const std::string& kind_name, const std::string& config_path, const std::string& out_csv,
              const std::string& plot_path) {
    using namespace aircomp;
    SweepSpec spec;
    try {
        const auto kind = parse_sweep_kind(kind_name);
        spec = make_sweep_spec(load_run_config(config_path), kind);
    } catch (const Error& e) {
        std::cerr << "aircomp sweep: " << e.what() << '\n';
        return kConfig;
    }

    std::vector<AggregateRecord> rows;
    try {
        rows = run_sweep(spec);
    } catch (const Error& e) {
        std::cerr << "aircomp sweep: " << e.what() << '\n';
        return exit_for(e);
    }

    try {
        write_file_atomic(out_csv, results_csv(rows));
        if (!plot_path.empty()) {
            const char* axis = spec.kind == SweepKind::snr ? "SNR (dB)" : spec.kind == SweepKind::n ? "N" : "K";
            write_file_atomic(plot_path, results_svg(rows, axis));
        }
    } catch (const Error& e) {
        std::cerr << "aircomp sweep: " << e.what() << '\n';
        return kIo;
    }
    return kOk;
}

int cmd_verify(const std::string& suite, int trials, std::uint64_t seed) {
    using namespace aircomp;
    SuiteReport r;
    try {
        r = run_verify_suite(suite, trials, seed);
    } catch (const Error& e) {
        std::cerr << "aircomp verify: " << e.what() << '\n';
        return exit_for(e);
    }
    std::printf("suite=%s trials=%d passed=%d failed=%d worst_deviation=%.3e tolerance=%.1e\n", r.suite.c_str(),
                r.trials, r.passed, r.failed, r.worst_deviation, r.tolerance);
    return r.ok() ? kOk : kVerify;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Worst-case robust RIS-aided over-the-air computation designer"};
    app.require_subcommand(1);

    std::string config, out, kind, plot, suite;
    int trials = 0;
    std::uint64_t seed = 0;

    auto* solve = app.add_subcommand("solve", "Design one instance and write the design document (JSON)");
    solve->add_option("--config", config, "Run configuration (JSON)")->required();
    solve->add_option("--out", out, "Output path for the design document")->required();

    auto* sweep = app.add_subcommand("sweep", "Monte Carlo NMSE sweep written as CSV");
    sweep->add_option("--kind", kind, "Sweep axis")->required()->check(CLI::IsMember({"snr", "n", "k"}));
    sweep->add_option("--config", config, "Run configuration (JSON)")->required();
    sweep->add_option("--out", out, "Output CSV")->required();
    sweep->add_option("--plot", plot, "Optional SVG plot");

    auto* verify = app.add_subcommand("verify", "Randomized property suite");
    verify->add_option("--suite", suite, "Suite name")->required()->check(
        CLI::IsMember({"worstcase", "kkt", "oracle", "monotone"}));
    verify->add_option("--trials", trials, "Number of random instances")->required();
    verify->add_option("--seed", seed, "Random seed")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    if (*solve) return cmd_solve(config, out);
    if (*sweep) return cmd_sweep(kind, config, out, plot);
    return cmd_verify(suite, trials, seed);
}
