#pragma once

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace edg {

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class ExperimentKind { Edg, Heat, Kernel, Scaling, Verify };

struct PresetSpec {
    std::string type = "monodisperse"; // monodisperse | geometric | custom
    double q = 0.5;                    // geometric ratio
    std::string path;                  // custom CSV (k,c_k)
};

struct ExperimentConfig {
    int schema_version = 1;
    ExperimentKind kind = ExperimentKind::Verify;
    double lambda = 1.0;
    double rho = 0.5;
    PresetSpec preset;
    int n = 1024;
    double t_end = 100.0;
    double dt_init = 1e-3;
    std::string scheme = "crank_nicolson"; // or explicit_rk4
    double tol = 1e-10;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    std::vector<double> output_times; // optional; default log grid

    // Field-by-field validation; returns messages naming offending fields.
    std::vector<std::string> validation_errors() const;
    void validate_or_throw() const;

    std::string canonical_json() const; // sorted keys, stable doubles
    std::string config_hash() const;    // fnv1a64 of canonical_json
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_file(const std::string& path);

// Exit codes: 0 success, 1 threshold failure (verify), 2 validation, 3 numerical.
struct RunResult {
    int exit_code = 0;
    std::string summary_json; // serialized run summary
    std::vector<std::string> files;
};

RunResult run_experiment(const ExperimentConfig& cfg);

// Runs the cartesian product of lambdas x seeds concurrently and aggregates
// the per-run summaries keyed by config hash (order independent).
struct SweepResult {
    int exit_code = 0;
    std::string aggregate_json;
};

SweepResult sweep(const ExperimentConfig& base, const std::vector<double>& lambdas,
                  const std::vector<std::uint64_t>& seeds);

} // namespace edg
