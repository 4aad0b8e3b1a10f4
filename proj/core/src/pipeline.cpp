#include <ddc/pipeline.hpp>

#include <ddc/lmi.hpp>

#include <nlohmann/json.hpp>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace ddc {
namespace {

using json = nlohmann::ordered_json;

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string file_hash(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a_hex(ss.str());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

std::string status_name(SynthesisStatus s) {
    switch (s) {
        case SynthesisStatus::Success: return "success";
        case SynthesisStatus::Infeasible: return "infeasible";
        case SynthesisStatus::ExtractionSingular: return "extraction-singular";
        case SynthesisStatus::NumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

struct TrialOutcome {
    bool lmi_feasible = false;
    bool verified = false;
    std::string status;
    double rho = 0.0;
};

TrialOutcome run_robust_trial(const PlantModel& plant, const ExperimentConfig& cfg,
                              const RngStream& stream, double margin) {
    TrialOutcome out;
    try {
        ExperimentData data = run_experiments(plant, cfg, stream);
        DescriptorData d = build_descriptor(data.agg1, data.agg2, cfg);
        SynthesisResult res = synth_robust(d, margin);
        out.status = status_name(res.status);
        out.lmi_feasible = res.status == SynthesisStatus::Success ||
                           res.status == SynthesisStatus::ExtractionSingular;
        if (res.ok()) {
            out.rho = spectral_radius(plant.A + plant.B * res.gain->F);
            out.verified = out.rho < 1.0;
        }
    } catch (const ConditioningError&) {
        out.status = "conditioning-exhausted";
    }
    return out;
}

}  // namespace

PlantModel example_plant() {
    PlantModel plant;
    plant.A = Mat{{0.850, -0.038, -0.380}, {0.735, 0.815, 1.594}, {-0.664, 0.697, -0.064}};
    plant.B = Mat{{1.431, 0.705}, {1.620, -1.129}, {0.913, 0.369}};
    plant.Bw = Mat::Identity(3, 3);
    plant.C = Mat{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
    plant.D = Mat::Identity(2, 2);
    return plant;
}

void BenchConfig::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("config: cannot open " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ParseError("config: malformed JSON in " + path.string());
    if (j.contains("plant")) plant_path = j["plant"].get<std::string>();
    if (j.contains("s0")) s0 = j["s0"].get<double>();
    if (j.contains("l")) l = j["l"].get<int>();
    if (j.contains("delta")) delta = j["delta"].get<double>();
    if (j.contains("gamma")) gamma = j["gamma"].get<double>();
    if (j.contains("noise_levels")) noise_levels = j["noise_levels"].get<std::vector<double>>();
    if (j.contains("trials")) trials = j["trials"].get<int>();
    if (j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out")) out_dir = j["out"].get<std::string>();
    if (j.contains("cond_threshold")) cond_threshold = j["cond_threshold"].get<double>();
    if (j.contains("max_retries")) max_retries = j["max_retries"].get<int>();
    if (j.contains("margin")) margin = j["margin"].get<double>();
    if (j.contains("threads")) threads = j["threads"].get<int>();
    if (j.contains("with_oracle")) with_oracle = j["with_oracle"].get<bool>();
    if (j.contains("synth_methods")) synth_methods = j["synth_methods"].get<std::string>();
}

PlantModel BenchConfig::resolve_plant() const {
    if (plant_path.empty()) return example_plant();
    return load_plant(plant_path);
}

ExperimentConfig BenchConfig::experiment_config(const PlantModel& plant) const {
    ExperimentConfig cfg;
    cfg.n = plant.n();
    cfg.m = plant.m();
    cfg.l = l;
    cfg.s0 = s0;
    cfg.delta = delta;
    cfg.cond_threshold = cond_threshold;
    cfg.max_retries = max_retries;
    cfg.seed = seed;
    return cfg;
}

int cmd_gen(const BenchConfig& config) {
    PlantModel plant = config.resolve_plant();
    ExperimentConfig cfg = config.experiment_config(plant);
    ExperimentData data = run_experiments(plant, cfg, RngStream(config.seed));

    std::filesystem::create_directories(config.out_dir);
    const std::filesystem::path dir = config.out_dir;
    save_plant(dir / "plant.json", plant);
    ExperimentFileMeta meta{config.s0, config.delta, config.l, config.seed};
    save_experiment1(dir / "exp1.json", data.record1, data.agg1, meta, config.with_oracle);
    save_experiment2(dir / "exp2.json", data.record2, data.agg2, meta, config.with_oracle);
    std::cout << "wrote " << (dir / "exp1.json").string() << ", "
              << (dir / "exp2.json").string() << " (retries: " << data.retries_used << ")\n";
    return 0;
}

int cmd_build_descriptor(const BenchConfig& config, const std::filesystem::path& data_dir,
                         const std::filesystem::path& out_file) {
    LoadedExperiment1 e1 = load_experiment1(data_dir / "exp1.json");
    LoadedExperiment2 e2 = load_experiment2(data_dir / "exp2.json");
    ExperimentConfig cfg;
    cfg.n = static_cast<int>(e1.agg.N.rows());
    cfg.m = static_cast<int>(e2.agg.R1.cols());
    cfg.l = e1.meta.l;
    cfg.s0 = e1.meta.s0;
    cfg.delta = e1.meta.delta;
    cfg.cond_threshold = config.cond_threshold;
    cfg.max_retries = config.max_retries;
    DescriptorData d = build_descriptor(e1.agg, e2.agg, cfg);
    save_descriptor(out_file, d);
    std::cout << "wrote " << out_file.string() << "\n";
    return 0;
}

int cmd_synth(const BenchConfig& config, const std::filesystem::path& descriptor_file,
              const std::string& method, const std::filesystem::path& out_file,
              const std::string& dump_lmi_path) {
    DescriptorData d = load_descriptor(descriptor_file);
    if (!dump_lmi_path.empty()) {
        AssembledLmi assembled = method == "hinf" ? assemble_hinf_lmi(augment(d), config.gamma)
                                                  : assemble_robust_lmi(augment(d));
        write_text(dump_lmi_path, lmi_debug_json(assembled.lmi, assembled.variables));
    }
    SynthesisResult res = method == "hinf" ? synth_hinf(d, config.gamma, config.margin)
                                           : synth_robust(d, config.margin);
    if (!res.ok()) {
        std::cerr << "synthesis " << status_name(res.status) << " (" << method << ")\n";
        return 2;
    }
    ControllerGain gain = *res.gain;
    gain.seed_provenance = "descriptor:" + file_hash(descriptor_file) +
                           ";seed:" + std::to_string(config.seed);
    save_controller(out_file, gain);
    std::cout << "wrote " << out_file.string() << " (margin " << res.certificate->achieved_margin
              << ", " << res.iterations << " iterations)\n";
    return 0;
}

int cmd_verify(const BenchConfig& config, const std::filesystem::path& plant_file,
               const std::filesystem::path& controller_file, std::optional<double> gamma) {
    PlantModel plant = load_plant(plant_file);
    ControllerGain gain = load_controller(controller_file);
    std::optional<double> target = gamma ? gamma : gain.gamma;
    VerifyOptions options;
    options.noise_delta = config.delta;
    options.noise_seed = RngStream(config.seed).child_seed(0x7e51f7);
    VerificationReport report = verify_controller(plant, gain.F, target, options);
    std::cout << report_to_json(report) << "\n";
    return report.pass() ? 0 : 1;
}

int cmd_simulate(const BenchConfig& config, const std::filesystem::path& controller_file,
                 int steps, const std::filesystem::path& out_file) {
    if (steps < 1) throw std::invalid_argument("simulate: steps must be >= 1");
    PlantModel plant = config.resolve_plant();
    NoiseProcess noise{config.delta, RngStream(config.seed).child_seed(0x51a7e)};
    Trajectory traj;
    if (!controller_file.empty()) {
        ControllerGain gain = load_controller(controller_file);
        traj = simulate_closed_loop(plant, gain.F, Vec::Zero(plant.n()), noise, steps);
    } else {
        std::vector<Vec> zeros(steps, Vec::Zero(plant.m()));
        traj = simulate(plant, Vec::Zero(plant.n()), zeros, noise);
    }
    save_trajectory_csv(out_file, traj);
    std::cout << "wrote " << out_file.string() << "\n";
    return 0;
}

std::vector<MonteCarloRow> run_montecarlo(const BenchConfig& config, const PlantModel& plant) {
    if (config.noise_levels.empty())
        throw std::invalid_argument("montecarlo: noise_levels must be nonempty");
    if (config.trials < 1) throw std::invalid_argument("montecarlo: trials must be >= 1");

    const int levels = static_cast<int>(config.noise_levels.size());
    const int total = levels * config.trials;
    std::vector<TrialOutcome> outcomes(total);

    int nthreads = config.threads > 0 ? config.threads
                                      : static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::max(1, std::min(nthreads, total));

    RngStream root(config.seed);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int task = next.fetch_add(1); task < total; task = next.fetch_add(1)) {
            const int level = task / config.trials;
            const int trial = task % config.trials;
            ExperimentConfig cfg = config.experiment_config(plant);
            cfg.delta = config.noise_levels[level];
            outcomes[task] =
                run_robust_trial(plant, cfg, root.child(level).child(trial), config.margin);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::vector<MonteCarloRow> rows;
    for (int level = 0; level < levels; ++level) {
        MonteCarloRow row;
        row.delta = config.noise_levels[level];
        row.trials = config.trials;
        for (int trial = 0; trial < config.trials; ++trial) {
            const TrialOutcome& o = outcomes[level * config.trials + trial];
            row.lmi_feasible_count += o.lmi_feasible ? 1 : 0;
            row.verified_success_count += o.verified ? 1 : 0;
        }
        row.percentage = 100.0 * row.verified_success_count / row.trials;
        rows.push_back(row);
    }

    // detail file: both counts plus the per-trial seed manifest
    std::filesystem::create_directories(config.out_dir);
    json detail;
    detail["seed"] = config.seed;
    detail["trials_per_level"] = config.trials;
    json jlevels = json::array();
    for (int level = 0; level < levels; ++level) {
        json jl;
        jl["delta"] = config.noise_levels[level];
        jl["lmi_feasible"] = rows[level].lmi_feasible_count;
        jl["verified"] = rows[level].verified_success_count;
        json jt = json::array();
        for (int trial = 0; trial < config.trials; ++trial) {
            const TrialOutcome& o = outcomes[level * config.trials + trial];
            jt.push_back({{"trial", trial},
                          {"status", o.status},
                          {"verified", o.verified},
                          {"rho", o.rho}});
        }
        jl["trials"] = jt;
        jlevels.push_back(jl);
    }
    detail["levels"] = jlevels;
    write_text(std::filesystem::path(config.out_dir) / "montecarlo_detail.json",
               detail.dump(2));
    return rows;
}

int cmd_montecarlo(const BenchConfig& config) {
    PlantModel plant = config.resolve_plant();
    std::vector<MonteCarloRow> rows = run_montecarlo(config, plant);
    std::filesystem::create_directories(config.out_dir);
    const std::filesystem::path table = std::filesystem::path(config.out_dir) / "table.csv";
    std::ofstream out(table);
    if (!out) throw std::runtime_error("cannot open " + table.string() + " for writing");
    out << "delta,trials,successes,percentage\n";
    char buf[128];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%d,%d,%.17g\n", row.delta, row.trials,
                      row.verified_success_count, row.percentage);
        out << buf;
    }
    out.close();
    for (const auto& row : rows)
        std::cout << "delta " << row.delta << ": verified " << row.verified_success_count << "/"
                  << row.trials << " (lmi-feasible " << row.lmi_feasible_count << ")\n";
    std::cout << "wrote " << table.string() << "\n";
    return 0;
}

int cmd_figure1(const BenchConfig& config) {
    PlantModel plant = config.resolve_plant();
    ExperimentConfig cfg = config.experiment_config(plant);
    RngStream root(config.seed);
    ExperimentData data = run_experiments(plant, cfg, root.child(0));
    DescriptorData d = build_descriptor(data.agg1, data.agg2, cfg);

    SynthesisResult robust = synth_robust(d, config.margin);
    SynthesisResult hinf = synth_hinf(d, config.gamma, config.margin);
    if (!robust.ok() || !hinf.ok()) {
        std::cerr << "figure1: missing gains (robust " << status_name(robust.status)
                  << ", hinf " << status_name(hinf.status) << ")\n";
        return 2;
    }

    // identical noise realization for the two closed loops
    const int steps = 100;
    NoiseProcess noise{config.delta, root.child_seed(1)};
    Trajectory traj_r =
        simulate_closed_loop(plant, robust.gain->F, Vec::Zero(plant.n()), noise, steps);
    Trajectory traj_h =
        simulate_closed_loop(plant, hinf.gain->F, Vec::Zero(plant.n()), noise, steps);

    std::filesystem::create_directories(config.out_dir);
    const std::filesystem::path dir = config.out_dir;
    save_outputs_csv(dir / "y_robust.csv", traj_r);
    save_outputs_csv(dir / "y_hinf.csv", traj_h);

    double energy_r = 0.0, energy_h = 0.0;
    for (int k = 0; k < steps; ++k) {
        energy_r += traj_r.outputs[k].squaredNorm();
        energy_h += traj_h.outputs[k].squaredNorm();
    }
    json meta;
    meta["steps"] = steps;
    meta["delta"] = config.delta;
    meta["output_energy_robust"] = energy_r;
    meta["output_energy_hinf"] = energy_h;
    write_text(dir / "figure1_meta.json", meta.dump(2));
    std::cout << "wrote " << (dir / "y_robust.csv").string() << ", "
              << (dir / "y_hinf.csv").string() << "\n";
    return 0;
}

int cmd_pipeline(const BenchConfig& config) {
    PlantModel plant = config.resolve_plant();
    ExperimentConfig cfg = config.experiment_config(plant);
    std::filesystem::create_directories(config.out_dir);
    const std::filesystem::path dir = config.out_dir;

    json summary;
    summary["seed"] = config.seed;
    summary["delta"] = config.delta;

    ExperimentData data;
    try {
        data = run_experiments(plant, cfg, RngStream(config.seed));
    } catch (const ConditioningError& e) {
        summary["stage_failed"] = "gen";
        summary["error"] = e.what();
        write_text(dir / "summary.json", summary.dump(2));
        std::cerr << e.what() << "\n";
        return 1;
    }
    save_plant(dir / "plant.json", plant);
    ExperimentFileMeta meta{config.s0, config.delta, config.l, config.seed};
    save_experiment1(dir / "exp1.json", data.record1, data.agg1, meta, config.with_oracle);
    save_experiment2(dir / "exp2.json", data.record2, data.agg2, meta, config.with_oracle);
    summary["retries"] = data.retries_used;

    DescriptorData d = build_descriptor(data.agg1, data.agg2, cfg);
    save_descriptor(dir / "descriptor.json", d);

    // exact-identity residuals against the recorded noise (simulator-side)
    ResidualReport resid = residual_report(d, plant, data.agg1.oracle_W, data.agg2.oracle_W0);
    summary["identity_residuals"] = {{"e", resid.e_residual},
                                     {"a", resid.a_residual},
                                     {"b", resid.b_residual},
                                     {"c", resid.c_residual},
                                     {"d", resid.d_residual}};
    summary["identities_ok"] = resid.max_residual() <= 1e-8;

    const bool want_robust = config.synth_methods == "both" || config.synth_methods == "robust";
    const bool want_hinf = config.synth_methods == "both" || config.synth_methods == "hinf";
    bool all_verified = true;

    VerifyOptions voptions;
    voptions.noise_delta = config.delta;
    voptions.noise_seed = RngStream(config.seed).child_seed(0x7e51f7);

    if (want_robust) {
        SynthesisResult res = synth_robust(d, config.margin);
        json stage;
        stage["status"] = status_name(res.status);
        if (res.ok()) {
            ControllerGain gain = *res.gain;
            gain.seed_provenance = "seed:" + std::to_string(config.seed);
            save_controller(dir / "controller_robust.json", gain);
            VerificationReport rep = verify_controller(plant, gain.F, std::nullopt, voptions);
            stage["spectral_radius"] = rep.spectral_radius;
            stage["verified_stable"] = rep.stable;
            all_verified = all_verified && rep.stable;
        } else {
            all_verified = false;
        }
        summary["robust"] = stage;
    }
    if (want_hinf) {
        SynthesisResult res = synth_hinf(d, config.gamma, config.margin);
        json stage;
        stage["status"] = status_name(res.status);
        stage["gamma"] = config.gamma;
        if (res.ok()) {
            ControllerGain gain = *res.gain;
            gain.seed_provenance = "seed:" + std::to_string(config.seed);
            save_controller(dir / "controller_hinf.json", gain);
            VerificationReport rep = verify_controller(plant, gain.F, config.gamma, voptions);
            stage["spectral_radius"] = rep.spectral_radius;
            stage["verified_stable"] = rep.stable;
            if (rep.stable) stage["hinf_norm"] = rep.hinf_norm;
            stage["gamma_ok"] = rep.pass();
            all_verified = all_verified && rep.stable;
        } else {
            all_verified = false;
        }
        summary["hinf"] = stage;
    }

    summary["verified_success"] = all_verified;
    write_text(dir / "summary.json", summary.dump(2));
    std::cout << "wrote " << (dir / "summary.json").string() << "\n";
    return all_verified ? 0 : 1;
}

}  // namespace ddc
