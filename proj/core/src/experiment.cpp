#include "edg/experiment.hpp"

#include "edg/bessel.hpp"
#include "edg/cluster.hpp"
#include "edg/continuum.hpp"
#include "edg/discrete.hpp"
#include "edg/heat.hpp"
#include "edg/io.hpp"
#include "edg/profiles.hpp"
#include "edg/quadrature.hpp"
#include "edg/scaling.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace edg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string kind_to_string(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::Edg: return "edg";
    case ExperimentKind::Heat: return "heat";
    case ExperimentKind::Kernel: return "kernel";
    case ExperimentKind::Scaling: return "scaling";
    case ExperimentKind::Verify: return "verify";
    }
    return "?";
}

ExperimentKind kind_from_string(const std::string& s) {
    if (s == "edg") return ExperimentKind::Edg;
    if (s == "heat") return ExperimentKind::Heat;
    if (s == "kernel") return ExperimentKind::Kernel;
    if (s == "scaling") return ExperimentKind::Scaling;
    if (s == "verify") return ExperimentKind::Verify;
    throw ConfigError("kind: unknown experiment kind '" + s + "'");
}

HeatScheme scheme_from_string(const std::string& s) {
    if (s == "crank_nicolson") return HeatScheme::CrankNicolson;
    if (s == "explicit_rk4") return HeatScheme::ExplicitRk4;
    throw ConfigError("scheme: must be crank_nicolson or explicit_rk4");
}

std::vector<double> default_output_times(double t_end, double t_start_hint) {
    const double t_start = std::max(t_start_hint, t_end * 1e-3);
    const int per_decade = 30;
    const double decades = std::log10(t_end / t_start);
    const int m = std::max(2, static_cast<int>(std::ceil(per_decade * decades)));
    std::vector<double> out;
    out.reserve(static_cast<size_t>(m) + 1);
    for (int i = 0; i <= m; ++i)
        out.push_back(t_start * std::pow(t_end / t_start, static_cast<double>(i) / m));
    out.back() = t_end;
    return out;
}

ClusterState build_initial_state(const ExperimentConfig& cfg) {
    if (cfg.preset.type == "monodisperse")
        return monodisperse_state(cfg.lambda, cfg.rho, cfg.n);
    if (cfg.preset.type == "geometric")
        return geometric_state(cfg.lambda, cfg.rho, cfg.preset.q, cfg.n);
    if (cfg.preset.type == "custom") {
        std::ifstream f(cfg.preset.path);
        if (!f) throw ConfigError("preset.path: cannot open " + cfg.preset.path);
        std::vector<double> c(static_cast<size_t>(cfg.n) + 1, 0.0);
        std::string line;
        while (std::getline(f, line)) {
            if (line.empty() || !(std::isdigit(line[0]) || line[0] == '-')) continue;
            std::istringstream row(line);
            long long k;
            char comma;
            double v;
            if (!(row >> k >> comma >> v)) continue;
            if (k < 0 || k > cfg.n) throw ConfigError("preset.path: cluster index out of range");
            c[static_cast<size_t>(k)] = v;
        }
        ClusterState s(std::move(c), cfg.lambda, cfg.rho);
        try {
            s.validate(1e-8);
        } catch (const std::exception& e) {
            // Non-normalized data is rejected, not rescaled.
            throw ConfigError(std::string("preset.path: ") + e.what());
        }
        return s;
    }
    throw ConfigError("preset.type: unknown preset '" + cfg.preset.type + "'");
}

HeatRunConfig heat_config(const ExperimentConfig& cfg) {
    HeatRunConfig h;
    h.lambda = cfg.lambda;
    h.n = cfg.n;
    h.t_end = cfg.t_end;
    h.dt_init = cfg.dt_init;
    h.scheme = scheme_from_string(cfg.scheme);
    return h;
}

json fit_to_json(const FitReport& rep) {
    json j;
    j["exponent"] = rep.exponent;
    j["stderr"] = rep.stderr_slope;
    j["r2"] = rep.r2;
    j["t_lo"] = rep.t_lo;
    j["t_hi"] = rep.t_hi;
    j["amplitude"] = rep.amplitude;
    switch (rep.regime) {
    case CoarseningRegime::Algebraic: j["regime"] = "algebraic"; break;
    case CoarseningRegime::Exponential: j["regime"] = "exponential"; break;
    case CoarseningRegime::Blowup: j["regime"] = "blowup"; break;
    }
    return j;
}

void write_manifest(const ExperimentConfig& cfg, const fs::path& dir) {
    json m;
    m["config"] = json::parse(cfg.canonical_json());
    m["config_hash"] = cfg.config_hash();
    m["created_unix"] = static_cast<long long>(std::time(nullptr));
    write_text_file((dir / "manifest.json").string(), m.dump(2) + "\n");
}

RunResult finish(const ExperimentConfig& cfg, const fs::path& dir, json summary,
                 std::vector<std::string> files, int exit_code = 0) {
    summary["config_hash"] = cfg.config_hash();
    summary["schema_version"] = cfg.schema_version;
    const std::string text = summary.dump(2) + "\n";
    write_text_file((dir / "summary.json").string(), text);
    files.push_back((dir / "summary.json").string());
    write_manifest(cfg, dir);
    RunResult res;
    res.exit_code = exit_code;
    res.summary_json = text;
    res.files = std::move(files);
    return res;
}

RunResult run_edg(const ExperimentConfig& cfg, const fs::path& dir) {
    const ClusterState c0 = build_initial_state(cfg);
    HeatRunConfig h = heat_config(cfg);
    std::vector<double> outs =
        cfg.output_times.empty() ? default_output_times(cfg.t_end, 10.0 * cfg.dt_init)
                                 : cfg.output_times;
    TimeChangeResult tc = solve_edg_timechange(c0, cfg.t_end, h, outs);
    const TimeChangeMap& map = tc.map;

    // Observables along the dense time-change grid, thinned to <= 4000 rows.
    CsvWriter obs({"t", "ell", "m0", "mlambda", "tau"});
    const size_t stride = std::max<size_t>(1, map.t_of_tau.size() / 4000);
    for (size_t i = 0; i < map.t_of_tau.size(); i += stride) {
        const double m0 = map.m0[i];
        obs.add_row({map.t_of_tau[i], m0 > 0.0 ? cfg.rho / m0 : 0.0, m0,
                     map.mlambda[i], map.tau_grid[i]});
    }
    write_text_file((dir / "observables.csv").string(), obs.str());

    // Sparse snapshots.
    CsvWriter trajcsv({"t", "k", "c_k"});
    const double thresh = 1e-20 * cfg.rho;
    for (size_t i = 0; i < tc.trajectory.times.size(); ++i) {
        const ClusterState& s = tc.trajectory.states[i];
        for (int k = 0; k <= s.n(); ++k)
            if (std::abs(s.c[static_cast<size_t>(k)]) > thresh)
                trajcsv.add_row({tc.trajectory.times[i], static_cast<double>(k),
                                 s.c[static_cast<size_t>(k)]});
    }
    write_text_file((dir / "trajectory.csv").string(), trajcsv.str());

    json summary;
    summary["kind"] = "edg";
    summary["lambda"] = cfg.lambda;
    summary["rho"] = cfg.rho;
    summary["n"] = cfg.n;
    summary["leak"] = tc.trajectory.leak;
    summary["truncation_contaminated"] = tc.truncation_contaminated;
    switch (tc.trajectory.halt) {
    case HaltReason::ReachedEnd: summary["halting"] = "t_end"; break;
    case HaltReason::Blowup: summary["halting"] = "blowup"; break;
    case HaltReason::StepUnderflow: summary["halting"] = "dt_underflow"; break;
    }
    if (map.gel_time_estimate) summary["gel_time_estimate"] = *map.gel_time_estimate;
    if (!tc.trajectory.states.empty()) {
        const ClusterState& last = tc.trajectory.states.back();
        summary["volume_drift"] = std::abs(last.volume() - 1.0);
        summary["mass_drift"] = std::abs(last.mass() - cfg.rho);
    }

    // Coarsening fit on ell = rho / M_0.
    try {
        std::vector<double> ts, ells;
        for (size_t i = 1; i < map.t_of_tau.size(); ++i) {
            if (map.m0[i] <= 0.0) continue;
            ts.push_back(map.t_of_tau[i]);
            ells.push_back(cfg.rho / map.m0[i]);
        }
        const CoarseningRegime regime = coarsening_regime(cfg.lambda);
        const double t_star = map.gel_time_estimate ? *map.gel_time_estimate : 0.0;
        summary["fit"] = fit_to_json(fit_coarsening_exponent(ts, ells, regime, t_star));
    } catch (const std::exception& e) {
        summary["fit"] = nullptr;
        summary["fit_error"] = e.what();
    }
    return finish(cfg, dir, std::move(summary),
                  {(dir / "observables.csv").string(), (dir / "trajectory.csv").string()});
}

RunResult run_heat(const ExperimentConfig& cfg, const fs::path& dir) {
    const ClusterState c0 = build_initial_state(cfg);
    std::vector<double> density(c0.c.begin() + 1, c0.c.end());
    LatticeField u0(density, cfg.lambda);
    HeatRunConfig h = heat_config(cfg);
    h.output_times = cfg.output_times.empty()
                         ? default_output_times(cfg.t_end, 10.0 * cfg.dt_init)
                         : cfg.output_times;
    HeatTrajectory traj = solve_np(tail_transform(u0), h);

    CsvWriter snap({"t", "k", "value"});
    const size_t kstride = std::max<size_t>(1, static_cast<size_t>(cfg.n) / 2048);
    for (size_t i = 0; i < traj.times.size(); ++i)
        for (int k = 1; k <= cfg.n; k += static_cast<int>(kstride))
            snap.add_row({traj.times[i], static_cast<double>(k), traj.fields[i].at_k(k)});
    write_text_file((dir / "snapshots.csv").string(), snap.str());

    DecayReport dec = decay_report(traj);
    json summary;
    summary["kind"] = "heat";
    summary["lambda"] = cfg.lambda;
    summary["n"] = cfg.n;
    summary["mass_initial"] = traj.mass.front();
    summary["mass_final"] = traj.mass.back();
    summary["mass_drift"] = std::abs(traj.mass.back() - traj.mass.front());
    summary["truncation_contaminated"] = traj.truncation_contaminated;
    summary["steps"] = traj.steps;
    summary["decay_ratio_sup"] = dec.ratio_sup;
    summary["decay_ratio_energy"] = dec.ratio_energy;
    summary["decay_flagged"] = dec.flagged;
    return finish(cfg, dir, std::move(summary), {(dir / "snapshots.csv").string()});
}

RunResult run_kernel(const ExperimentConfig& cfg, const fs::path& dir) {
    const ProfileParams p(cfg.lambda);
    const double X = domain_cut(p, 1.0, 1e-10);
    CsvWriter table({"t", "x", "y", "psi"});
    const int m = 32;
    for (double t : {0.5, 1.0, 2.0}) {
        for (int i = 0; i <= m; ++i)
            for (int j = 0; j <= m; ++j) {
                const double x = X * i / m;
                const double y = X * j / m;
                table.add_row({t, x, y, psi_kernel(p, t, x, y)});
            }
    }
    write_text_file((dir / "kernel.csv").string(), table.str());

    json summary;
    summary["kind"] = "kernel";
    summary["lambda"] = cfg.lambda;
    summary["x_max"] = X;
    for (double y : {0.0, 1.0}) {
        const double mass =
            integrate_to_inf([&](double x) { return psi_kernel(p, 1.0, x, y); }, 0.0,
                             1e-12, 1e-9)
                .value;
        summary[y == 0.0 ? "mass_y0" : "mass_y1"] = mass;
    }
    return finish(cfg, dir, std::move(summary), {(dir / "kernel.csv").string()});
}

RunResult run_scaling(const ExperimentConfig& cfg, const fs::path& dir) {
    const ProfileParams p(cfg.lambda);
    const ClusterState c0 = build_initial_state(cfg);
    std::vector<double> density(c0.c.begin() + 1, c0.c.end());
    LatticeField u0(density, cfg.lambda);
    HeatRunConfig h = heat_config(cfg);
    h.output_times = default_output_times(cfg.t_end, std::max(1.0, cfg.t_end * 1e-3));
    HeatTrajectory traj = solve_np(tail_transform(u0), h);

    const double delta = cfg.lambda >= 1.0 ? 0.1 : 0.0;
    CsvWriter conv({"t", "sup_error", "window_ok"});
    for (size_t i = 0; i < traj.times.size(); ++i) {
        const SelfSimilarityError e =
            self_similarity_error(traj.fields[i], traj.times[i], delta, 3.0, p, cfg.rho);
        conv.add_row({traj.times[i], e.sup_error, e.window_ok ? 1.0 : 0.0});
    }
    write_text_file((dir / "selfsim.csv").string(), conv.str());

    json summary;
    summary["kind"] = "scaling";
    summary["lambda"] = cfg.lambda;
    summary["delta"] = delta;
    const SelfSimilarityError e_final = self_similarity_error(
        traj.fields.back(), traj.times.back(), delta, 3.0, p, cfg.rho);
    summary["final_sup_error"] = e_final.sup_error;
    summary["window_ok"] = e_final.window_ok;
    summary["profile_peak"] = cfg.rho / p.Z;

    HeatTrajectory dp = solve_dp(u0, h);
    const MomentAsymptotics ma = moment_asymptotics(dp, 0.5, p, cfg.rho);
    json mj;
    mj["nu"] = 0.5;
    mj["estimate"] = ma.estimate;
    mj["target"] = ma.target;
    mj["converged"] = ma.converged;
    summary["moment_asymptotics"] = mj;
    return finish(cfg, dir, std::move(summary), {(dir / "selfsim.csv").string()});
}

json verify_check(const std::string& name, double value, double threshold, bool pass) {
    json c;
    c["name"] = name;
    c["value"] = value;
    c["threshold"] = threshold;
    c["status"] = pass ? "pass" : "fail";
    return c;
}

RunResult run_verify(const ExperimentConfig& cfg, const fs::path& dir) {
    json checks = json::array();
    bool all_ok = true;
    auto record = [&](const std::string& name, double value, double threshold) {
        const bool ok = value <= threshold;
        checks.push_back(verify_check(name, value, threshold, ok));
        all_ok = all_ok && ok;
    };

    // Profile normalizations.
    for (double lam : {0.0, 0.5, 1.0, 1.5}) {
        const ProfileParams p(lam);
        const double m1 =
            integrate_to_inf([&](double x) { return x * profile_g(p, x); }, 0.0, 1e-14, 1e-11)
                .value;
        const double mG =
            integrate_to_inf([&](double x) { return profile_G(p, x); }, 0.0, 1e-14, 1e-11)
                .value;
        std::ostringstream nm;
        nm << "profile_normalization_lambda_" << lam;
        record(nm.str() + "_g", std::abs(m1 - 1.0), 1e-8);
        record(nm.str() + "_G", std::abs(mG - 1.0), 1e-8);
    }

    // Kernel normalization and the profile identity at y=0.
    {
        const ProfileParams p(1.0);
        const double mass =
            integrate_to_inf([&](double x) { return psi_kernel(p, 1.0, x, 1.0); }, 0.0,
                             1e-12, 1e-9)
                .value;
        record("psi_mass_lambda_1", std::abs(mass - 1.0), 1e-6);
        double dev = 0.0;
        for (double x = 0.0; x <= 4.0; x += 0.125)
            dev = std::max(dev, std::abs(psi_kernel(p, 1.0, x, 0.0) - profile_G(p, x)));
        record("psi_matches_profile_lambda_1", dev, 1e-10);
    }

    // Conservation on a short exchange run.
    {
        ExperimentConfig c = cfg;
        c.lambda = 1.0;
        c.rho = 0.5;
        c.n = 512;
        c.t_end = 10.0;
        HeatRunConfig h = heat_config(c);
        TimeChangeResult tc =
            solve_edg_timechange(monodisperse_state(1.0, 0.5, 512), 10.0, h, {10.0});
        const ClusterState& last = tc.trajectory.states.back();
        record("edg_volume_drift", std::abs(last.volume() - 1.0), 1e-8);
        record("edg_mass_drift", std::abs(last.mass() - 0.5), 1e-8);
    }

    // lambda = 0 solver against the explicit kernel.
    {
        const int n = 512;
        std::vector<double> u0(static_cast<size_t>(n), 0.0);
        u0[0] = 1.0;
        HeatRunConfig h;
        h.lambda = 0.0;
        h.n = n;
        h.t_end = 5.0;
        h.dt_init = 1e-3;
        h.dt_cap_factor = 0.005;
        HeatTrajectory traj = solve_dp(LatticeField(u0, 0.0), h);
        const std::vector<double> oracle = lambda0_oracle_density(5.0, 200, {1.0});
        double dev = 0.0;
        for (int k = 1; k <= 200; ++k)
            dev = std::max(dev, std::abs(traj.fields.back().at_k(k) -
                                         oracle[static_cast<size_t>(k) - 1]));
        record("lambda0_oracle_deviation", dev, 1e-6);
    }

    // Bessel recurrence residual.
    {
        double worst = 0.0;
        for (double nu : {0.5, 1.0, 2.5, 7.0}) {
            for (double z : {0.5, 2.0, 8.0, 20.0, 50.0}) {
                const double lo = bessel_i_scaled(nu - 1.0, z);
                const double hi = bessel_i_scaled(nu + 1.0, z);
                const double mid = bessel_i_scaled(nu, z);
                worst = std::max(worst, std::abs(lo - hi - 2.0 * nu / z * mid) / mid);
            }
        }
        record("bessel_recurrence_residual", worst, 1e-9);
    }

    json summary;
    summary["kind"] = "verify";
    summary["checks"] = checks;
    summary["status"] = all_ok ? "pass" : "fail";
    return finish(cfg, dir, std::move(summary), {}, all_ok ? 0 : 1);
}

} // namespace

std::vector<std::string> ExperimentConfig::validation_errors() const {
    std::vector<std::string> errs;
    if (!(lambda >= 0.0 && lambda < 2.0)) errs.push_back("lambda: must lie in [0,2)");
    if (!(rho > 0.0)) errs.push_back("rho: must be > 0");
    if (n < 4) errs.push_back("n: must be >= 4");
    if (!(t_end > 0.0)) errs.push_back("t_end: must be > 0");
    if (!(dt_init > 0.0 && dt_init <= 1.0)) errs.push_back("dt_init: must lie in (0,1]");
    if (scheme != "crank_nicolson" && scheme != "explicit_rk4")
        errs.push_back("scheme: must be crank_nicolson or explicit_rk4");
    if (!(tol > 0.0)) errs.push_back("tol: must be > 0");
    if (preset.type != "monodisperse" && preset.type != "geometric" && preset.type != "custom")
        errs.push_back("preset.type: must be monodisperse, geometric or custom");
    if (preset.type == "geometric" && !(preset.q > 0.0 && preset.q < 1.0))
        errs.push_back("preset.q: must lie in (0,1)");
    if (preset.type == "custom" && preset.path.empty())
        errs.push_back("preset.path: required for custom preset");
    if (preset.type == "monodisperse" && rho > 1.0)
        errs.push_back("rho: monodisperse preset needs rho <= 1");
    for (double t : output_times)
        if (!(t > 0.0) || t > t_end) {
            errs.push_back("output_times: entries must lie in (0, t_end]");
            break;
        }
    if (output_dir.empty()) errs.push_back("output_dir: must not be empty");
    return errs;
}

void ExperimentConfig::validate_or_throw() const {
    const auto errs = validation_errors();
    if (errs.empty()) return;
    std::string msg = "invalid config:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw ConfigError(msg);
}

std::string ExperimentConfig::canonical_json() const {
    return config_to_json(*this).dump();
}

std::string ExperimentConfig::config_hash() const {
    return hex64(fnv1a64(canonical_json()));
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    try {
        if (j.contains("schema_version")) cfg.schema_version = j.at("schema_version").get<int>();
        if (cfg.schema_version != 1) throw ConfigError("schema_version: unsupported");
        if (j.contains("kind")) cfg.kind = kind_from_string(j.at("kind").get<std::string>());
        if (j.contains("lambda")) cfg.lambda = j.at("lambda").get<double>();
        if (j.contains("rho")) cfg.rho = j.at("rho").get<double>();
        if (j.contains("n")) cfg.n = j.at("n").get<int>();
        if (j.contains("t_end")) cfg.t_end = j.at("t_end").get<double>();
        if (j.contains("dt_init")) cfg.dt_init = j.at("dt_init").get<double>();
        if (j.contains("scheme")) cfg.scheme = j.at("scheme").get<std::string>();
        if (j.contains("tol")) cfg.tol = j.at("tol").get<double>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("output_times"))
            cfg.output_times = j.at("output_times").get<std::vector<double>>();
        if (j.contains("preset")) {
            const json& p = j.at("preset");
            if (p.contains("type")) cfg.preset.type = p.at("type").get<std::string>();
            if (p.contains("q")) cfg.preset.q = p.at("q").get<double>();
            if (p.contains("path")) cfg.preset.path = p.at("path").get<std::string>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse: ") + e.what());
    }
    return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["schema_version"] = cfg.schema_version;
    j["kind"] = kind_to_string(cfg.kind);
    j["lambda"] = cfg.lambda;
    j["rho"] = cfg.rho;
    j["n"] = cfg.n;
    j["t_end"] = cfg.t_end;
    j["dt_init"] = cfg.dt_init;
    j["scheme"] = cfg.scheme;
    j["tol"] = cfg.tol;
    j["seed"] = cfg.seed;
    j["output_dir"] = cfg.output_dir;
    j["output_times"] = cfg.output_times;
    json p;
    p["type"] = cfg.preset.type;
    p["q"] = cfg.preset.q;
    p["path"] = cfg.preset.path;
    j["preset"] = p;
    return j;
}

ExperimentConfig config_from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config file: cannot open " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config file: ") + e.what());
    }
    return config_from_json(j);
}

RunResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate_or_throw();
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    switch (cfg.kind) {
    case ExperimentKind::Edg: return run_edg(cfg, dir);
    case ExperimentKind::Heat: return run_heat(cfg, dir);
    case ExperimentKind::Kernel: return run_kernel(cfg, dir);
    case ExperimentKind::Scaling: return run_scaling(cfg, dir);
    case ExperimentKind::Verify: return run_verify(cfg, dir);
    }
    throw std::logic_error("run_experiment: unknown kind");
}

SweepResult sweep(const ExperimentConfig& base, const std::vector<double>& lambdas,
                  const std::vector<std::uint64_t>& seeds) {
    if (lambdas.empty() || seeds.empty())
        throw ConfigError("sweep: need at least one lambda and one seed");
    struct Combo {
        ExperimentConfig cfg;
        std::string key; // hash of the config with output_dir cleared
        RunResult result;
        std::string error;
    };
    std::vector<Combo> combos;
    for (double lam : lambdas)
        for (std::uint64_t sd : seeds) {
            ExperimentConfig c = base;
            c.lambda = lam;
            c.seed = sd;
            ExperimentConfig keyed = c;
            keyed.output_dir.clear();
            const std::string key = keyed.config_hash();
            c.output_dir = (fs::path(base.output_dir) / ("run-" + key)).string();
            combos.push_back({c, key, {}, {}});
        }

    std::atomic<size_t> next{0};
    const unsigned workers =
        std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                           static_cast<unsigned>(combos.size()));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&combos, &next]() {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= combos.size()) return;
                try {
                    combos[i].result = run_experiment(combos[i].cfg);
                } catch (const ConfigError& e) {
                    combos[i].result.exit_code = 2;
                    combos[i].error = e.what();
                } catch (const std::exception& e) {
                    combos[i].result.exit_code = 3;
                    combos[i].error = e.what();
                }
            }
        });
    for (auto& th : pool) th.join();

    json agg;
    int worst = 0;
    for (const Combo& c : combos) {
        json entry;
        entry["lambda"] = c.cfg.lambda;
        entry["seed"] = c.cfg.seed;
        entry["exit_code"] = c.result.exit_code;
        entry["output_dir"] = c.cfg.output_dir;
        if (!c.result.summary_json.empty())
            entry["summary"] = json::parse(c.result.summary_json);
        if (!c.error.empty()) entry["error"] = c.error;
        agg[c.key] = entry;
        worst = std::max(worst, c.result.exit_code);
    }
    SweepResult res;
    res.exit_code = worst;
    res.aggregate_json = agg.dump(2) + "\n";
    return res;
}

} // namespace edg
