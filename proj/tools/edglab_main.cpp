// Command-line driver for the exchange-driven growth laboratory.
//
// Subcommands: edg, heat, kernel, scaling, verify, sweep. Each run writes a
// deterministic set of CSV/JSON artifacts into --out; exit codes are 0 on
// success, 1 on a failed verify threshold, 2 on configuration errors, 3 on
// numerical failure.

#include "edg/experiment.hpp"
#include "edg/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

void attach_common(CLI::App* cmd, edg::ExperimentConfig& cfg, std::string& config_path) {
    cmd->add_option("--config", config_path, "JSON config file (flags override it)");
    cmd->add_option("--lambda", cfg.lambda, "kernel exponent in [0,2)");
    cmd->add_option("--rho", cfg.rho, "mass density");
    cmd->add_option("--n", cfg.n, "lattice truncation size");
    cmd->add_option("--t-end", cfg.t_end, "final time");
    cmd->add_option("--dt", cfg.dt_init, "initial time step");
    cmd->add_option("--scheme", cfg.scheme, "crank_nicolson | explicit_rk4");
    cmd->add_option("--tol", cfg.tol, "solver tolerance");
    cmd->add_option("--seed", cfg.seed, "seed for randomized suites");
    cmd->add_option("--out", cfg.output_dir, "output directory");
    cmd->add_option("--preset", cfg.preset.type, "monodisperse | geometric | custom");
    cmd->add_option("--preset-q", cfg.preset.q, "geometric preset ratio");
    cmd->add_option("--preset-path", cfg.preset.path, "custom preset CSV (k,c_k)");
    cmd->add_option("--output-times", cfg.output_times, "explicit snapshot times");
}

int dispatch(edg::ExperimentConfig cfg, const std::string& config_path,
             const CLI::App* cmd, edg::ExperimentKind kind) {
    try {
        if (!config_path.empty()) {
            edg::ExperimentConfig file_cfg = edg::config_from_file(config_path);
            // Flags given on the command line win over file values.
            edg::ExperimentConfig flag_cfg = cfg;
            cfg = file_cfg;
            for (const auto* opt : cmd->get_options()) {
                const std::string name = opt->get_name();
                if (opt->count() == 0 || name == "--config") continue;
                if (name == "--lambda") cfg.lambda = flag_cfg.lambda;
                else if (name == "--rho") cfg.rho = flag_cfg.rho;
                else if (name == "--n") cfg.n = flag_cfg.n;
                else if (name == "--t-end") cfg.t_end = flag_cfg.t_end;
                else if (name == "--dt") cfg.dt_init = flag_cfg.dt_init;
                else if (name == "--scheme") cfg.scheme = flag_cfg.scheme;
                else if (name == "--tol") cfg.tol = flag_cfg.tol;
                else if (name == "--seed") cfg.seed = flag_cfg.seed;
                else if (name == "--out") cfg.output_dir = flag_cfg.output_dir;
                else if (name == "--preset") cfg.preset.type = flag_cfg.preset.type;
                else if (name == "--preset-q") cfg.preset.q = flag_cfg.preset.q;
                else if (name == "--preset-path") cfg.preset.path = flag_cfg.preset.path;
                else if (name == "--output-times") cfg.output_times = flag_cfg.output_times;
            }
        }
        cfg.kind = kind;
        const edg::RunResult res = edg::run_experiment(cfg);
        std::cout << res.summary_json;
        return res.exit_code;
    } catch (const edg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"edglab: exchange-driven growth and weighted heat equation laboratory"};
    app.require_subcommand(1);

    edg::ExperimentConfig cfg;
    if (const char* env_out = std::getenv("EDGLAB_OUT")) cfg.output_dir = env_out;
    std::string config_path;

    struct Sub {
        CLI::App* cmd;
        edg::ExperimentKind kind;
    };
    std::vector<Sub> subs = {
        {app.add_subcommand("edg", "exchange dynamics via the time-changed heat solver"),
         edg::ExperimentKind::Edg},
        {app.add_subcommand("heat", "weighted lattice heat equation (tail form)"),
         edg::ExperimentKind::Heat},
        {app.add_subcommand("kernel", "continuum kernel tabulation"),
         edg::ExperimentKind::Kernel},
        {app.add_subcommand("scaling", "self-similarity and moment asymptotics"),
         edg::ExperimentKind::Scaling},
        {app.add_subcommand("verify", "fast self-check battery"),
         edg::ExperimentKind::Verify},
    };
    for (auto& s : subs) attach_common(s.cmd, cfg, config_path);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a lambda x seed sweep");
    attach_common(sweep_cmd, cfg, config_path);
    std::vector<double> sweep_lambdas;
    std::vector<std::uint64_t> sweep_seeds{1};
    std::string sweep_kind = "edg";
    sweep_cmd->add_option("--lambdas", sweep_lambdas, "lambda values")->required();
    sweep_cmd->add_option("--seeds", sweep_seeds, "seed values");
    sweep_cmd->add_option("--kind", sweep_kind, "experiment kind to sweep");

    CLI11_PARSE(app, argc, argv);

    for (auto& s : subs)
        if (s.cmd->parsed()) return dispatch(cfg, config_path, s.cmd, s.kind);

    if (sweep_cmd->parsed()) {
        try {
            if (!config_path.empty()) cfg = edg::config_from_file(config_path);
            cfg.kind = edg::ExperimentKind::Edg;
            if (sweep_kind == "heat") cfg.kind = edg::ExperimentKind::Heat;
            else if (sweep_kind == "kernel") cfg.kind = edg::ExperimentKind::Kernel;
            else if (sweep_kind == "scaling") cfg.kind = edg::ExperimentKind::Scaling;
            else if (sweep_kind != "edg")
                throw edg::ConfigError("sweep --kind: must be edg, heat, kernel or scaling");
            const edg::SweepResult res = edg::sweep(cfg, sweep_lambdas, sweep_seeds);
            edg::write_text_file(cfg.output_dir + "/sweep.json", res.aggregate_json);
            std::cout << res.aggregate_json;
            return res.exit_code;
        } catch (const edg::ConfigError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        } catch (const std::exception& e) {
            std::cerr << "numerical error: " << e.what() << "\n";
            return 3;
        }
    }
    return 0;
}
