// ddc: data-driven robust and H-infinity state-feedback synthesis toolkit.
//
// Subcommands: gen, build-descriptor, synth robust|hinf, verify, simulate,
// montecarlo, figure1, pipeline. See README.md for the workflow.

#include <ddc/pipeline.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"data-driven robust control toolkit"};
    app.require_subcommand(1);

    ddc::BenchConfig config;
    std::string config_file;
    app.add_option("--config", config_file, "JSON config file (fields mirror the flags)");
    auto* seed_opt = app.add_option("--seed", config.seed, "base RNG seed");
    auto* out_opt = app.add_option("--out", config.out_dir, "output directory");
    auto* oracle_flag =
        app.add_flag("--with-oracle", config.with_oracle, "include noise records in output");

    // subcommand-local state
    std::string plant_file;
    std::string data_dir = "out";
    std::string descriptor_out = "descriptor.json";
    std::string descriptor_file = "descriptor.json";
    std::string controller_out = "controller.json";
    std::string controller_file;
    std::string method = "robust";
    std::string dump_lmi;
    std::string sim_out = "trajectory.csv";
    std::optional<double> gamma_flag;
    std::optional<double> delta_flag;
    std::optional<double> s0_flag;
    std::optional<int> l_flag;
    std::optional<int> trials_flag;
    std::optional<int> threads_flag;
    std::optional<double> margin_flag;
    std::optional<std::vector<double>> levels_flag;
    int steps = 100;

    auto add_plant = [&](CLI::App* cmd) {
        cmd->add_option("--plant", plant_file, "plant JSON (default: bundled example plant)");
    };
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--delta", delta_flag, "noise energy bound");
        cmd->add_option("--s0", s0_flag, "descriptor shift");
        cmd->add_option("--l", l_flag, "steps per sub-experiment");
        cmd->add_option("--margin", margin_flag, "LMI feasibility margin");
    };

    CLI::App* gen = app.add_subcommand("gen", "run both data experiments");
    add_plant(gen);
    add_common(gen);

    CLI::App* build = app.add_subcommand("build-descriptor", "data matrices -> descriptor");
    build->add_option("--data", data_dir, "directory with exp1.json/exp2.json");
    build->add_option("--out", descriptor_out, "output descriptor file");

    CLI::App* synth = app.add_subcommand("synth", "synthesize a controller gain");
    synth->add_option("method", method, "robust or hinf")
        ->check(CLI::IsMember({"robust", "hinf"}))
        ->required();
    synth->add_option("--descriptor", descriptor_file, "descriptor JSON");
    synth->add_option("--out", controller_out, "output controller file");
    synth->add_option("--gamma", gamma_flag, "attenuation level (hinf)");
    synth->add_option("--margin", margin_flag, "LMI feasibility margin");
    synth->add_option("--dump-lmi", dump_lmi, "write the assembled LMI structure as JSON");

    CLI::App* verify = app.add_subcommand("verify", "ground-truth verification of a gain");
    verify->add_option("--plant", plant_file, "plant JSON")->required();
    verify->add_option("--controller", controller_file, "controller JSON")->required();
    verify->add_option("--gamma", gamma_flag, "H-infinity target to enforce");
    verify->add_option("--delta", delta_flag, "noise bound for the empirical energy check");

    CLI::App* simulate = app.add_subcommand("simulate", "simulate the plant to CSV");
    add_plant(simulate);
    simulate->add_option("--controller", controller_file, "closed-loop gain (optional)");
    simulate->add_option("--steps", steps, "number of steps");
    simulate->add_option("--delta", delta_flag, "noise energy bound");
    simulate->add_option("--out", sim_out, "output CSV file");

    CLI::App* mc = app.add_subcommand("montecarlo", "robust synthesis success-rate table");
    add_plant(mc);
    add_common(mc);
    mc->add_option("--trials", trials_flag, "trials per noise level");
    mc->add_option("--levels", levels_flag, "noise levels");
    mc->add_option("--threads", threads_flag, "worker threads (0 = auto)");

    CLI::App* fig = app.add_subcommand("figure1", "output sequences under both controllers");
    add_plant(fig);
    add_common(fig);
    fig->add_option("--gamma", gamma_flag, "attenuation level for the hinf gain");

    CLI::App* pipeline = app.add_subcommand("pipeline", "gen -> descriptor -> synth -> verify");
    add_plant(pipeline);
    add_common(pipeline);
    pipeline->add_option("--gamma", gamma_flag, "attenuation level for the hinf gain");
    pipeline->add_option("--method", config.synth_methods, "robust, hinf or both")
        ->check(CLI::IsMember({"robust", "hinf", "both"}));

    for (CLI::App* sub : {gen, build, synth, verify, simulate, mc, fig, pipeline})
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_file.empty()) {
            // explicit flags win over the config file
            ddc::BenchConfig from_file;
            from_file.load_file(config_file);
            std::string methods = config.synth_methods;
            std::uint64_t seed = config.seed;
            std::string out_dir = config.out_dir;
            bool with_oracle = config.with_oracle;
            config = from_file;
            if (seed_opt->count() > 0) config.seed = seed;
            if (out_opt->count() > 0) config.out_dir = out_dir;
            if (oracle_flag->count() > 0) config.with_oracle = with_oracle;
            if (pipeline->count("--method") > 0) config.synth_methods = methods;
            if (plant_file.empty()) plant_file = config.plant_path;
        }
        config.plant_path = plant_file;
        if (delta_flag) config.delta = *delta_flag;
        if (s0_flag) config.s0 = *s0_flag;
        if (l_flag) config.l = *l_flag;
        if (margin_flag) config.margin = *margin_flag;
        if (gamma_flag) config.gamma = *gamma_flag;
        if (trials_flag) config.trials = *trials_flag;
        if (threads_flag) config.threads = *threads_flag;
        if (levels_flag) config.noise_levels = *levels_flag;

        if (gen->parsed()) return ddc::cmd_gen(config);
        if (build->parsed()) return ddc::cmd_build_descriptor(config, data_dir, descriptor_out);
        if (synth->parsed())
            return ddc::cmd_synth(config, descriptor_file, method, controller_out, dump_lmi);
        if (verify->parsed())
            return ddc::cmd_verify(config, plant_file, controller_file, gamma_flag);
        if (simulate->parsed()) return ddc::cmd_simulate(config, controller_file, steps, sim_out);
        if (mc->parsed()) return ddc::cmd_montecarlo(config);
        if (fig->parsed()) return ddc::cmd_figure1(config);
        if (pipeline->parsed()) return ddc::cmd_pipeline(config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
