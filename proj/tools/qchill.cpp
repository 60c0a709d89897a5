// qchill - command-line front end

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "qchill/runner.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Steady-state and trajectory analysis of quantum absorption chillers"};
    app.set_version_flag("--version", std::string(qchill::kToolVersion));
    app.require_subcommand(1);

    std::string config_path;
    qchill::RunOptions opt;
    std::string out_dir;
    std::uint64_t seed = 0;
    double omega_c = 0.0, omega_h = 0.0, g = 0.0, duration = 0.0;
    std::uint64_t n_traj = 0;

    app.add_option("--config", config_path, "JSON run configuration (defaults to the built-in four-level setup)")
        ->check(CLI::ExistingFile);
    auto* o_out = app.add_option("--out", out_dir, "output directory");
    auto* o_seed = app.add_option("--seed", seed, "random seed");
    app.add_flag("--check", opt.check_only, "run the invariant suite only, no data files");
    app.add_flag("--quiet", opt.quiet, "suppress progress output");
    app.add_flag("--dump-channels", opt.dump_channels, "also write the Bohr-channel table as channels.csv");
    auto* o_wc = app.add_option("--omega-c", omega_c, "override omega_c");
    auto* o_wh = app.add_option("--omega-h", omega_h, "override omega_h");
    auto* o_g = app.add_option("--g", g, "override the coupling g");
    auto* o_n = app.add_option("--n-trajectories", n_traj, "override the trajectory count (mcwf)");
    auto* o_t = app.add_option("--duration", duration, "override the trajectory duration (mcwf)");

    const std::map<std::string, std::string> about{
        {"steady", "steady state, heat currents, COP and internal temperatures at one point"},
        {"breakdown", "four-level stage decomposition of the heat currents over an omega_c grid"},
        {"diagnose", "transition graph: stages, stage pairs, leak directions"},
        {"mcwf", "quantum-jump ensemble estimate of the currents and cycle fluxes"},
        {"sweep", "heat currents, COP and entropy production over an omega_c grid"},
        {"optimize", "omega_c of maximum cooling power and the COP there"},
        {"repro-fig2", "closed and open four-level characteristic curves plus the entropy-share scan"},
    };
    for (const auto& name : qchill::subcommands()) app.add_subcommand(name, about.at(name))->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : qchill::kExitConfig;
    }

    if (*o_out) opt.out_dir = out_dir;
    if (*o_seed) opt.seed = seed;
    if (*o_wc) opt.omega_c = omega_c;
    if (*o_wh) opt.omega_h = omega_h;
    if (*o_g) opt.g = g;
    if (*o_n) opt.n_trajectories = n_traj;
    if (*o_t) opt.duration = duration;

    qchill::json doc;
    try {
        doc = config_path.empty() ? qchill::default_config_json() : qchill::read_json_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "qchill: " << e.what() << '\n';
        return qchill::kExitConfig;
    }

    const std::string sub = app.get_subcommands().front()->get_name();
    const qchill::RunResult r = qchill::run(sub, doc, opt, std::cout);
    if (r.exit_code != qchill::kExitOk) std::cerr << "qchill: " << r.message << '\n';
    return r.exit_code;
}
