// runner.hpp - subcommand orchestration shared by the CLI and the tests

#pragma once

#include <chrono>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "qchill/io.hpp"

namespace qchill {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,
    kExitSolver = 2,
    kExitInvariant = 3,
    kExitIo = 4,
};

inline const std::vector<std::string>& subcommands()
{
    static const std::vector<std::string> names{"steady", "breakdown", "diagnose", "mcwf",
                                                "sweep", "optimize", "repro-fig2"};
    return names;
}

// Command-line overrides applied to the config document before validation,
// so the digest always describes the effective configuration.
struct RunOptions {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> omega_c;
    std::optional<double> omega_h;
    std::optional<double> g;
    std::optional<std::uint64_t> n_trajectories;
    std::optional<double> duration;
    bool check_only{false};
    bool quiet{false};
    bool dump_channels{false};
};

struct RunResult {
    int exit_code{kExitOk};
    std::string message;
    std::vector<std::string> outputs;  // paths written, manifest last
    std::vector<InvariantCheck> checks;
};

inline json apply_overrides(json doc, const RunOptions& o)
{
    if (o.seed) doc["seed"] = *o.seed;
    if (o.omega_c) doc["omega_c"] = *o.omega_c;
    if (o.omega_h) doc["omega_h"] = *o.omega_h;
    if (o.g) doc["g"] = *o.g;
    if (o.n_trajectories) doc["mcwf"]["n_trajectories"] = *o.n_trajectories;
    if (o.duration) doc["mcwf"]["duration"] = *o.duration;
    if (o.out_dir) doc["output"]["dir"] = *o.out_dir;
    return doc;
}

namespace detail {

struct RunContext {
    const RunConfig& cfg;
    std::filesystem::path dir;
    bool quiet;
    std::ostream& log;
    std::vector<InvariantCheck> checks;
    std::vector<std::string> outputs;
    std::vector<std::string> warnings;
    json summary = json::object();

    std::string path(const std::string& name)
    {
        const std::string p = (dir / name).string();
        outputs.push_back(p);
        return p;
    }

    void note(const std::string& line)
    {
        if (!quiet) log << line << '\n';
    }
};

inline void require_four_level(const RunConfig& cfg, std::string_view what)
{
    if (cfg.kind != ModelKind::FourLevel) {
        throw ConfigError("/kind", std::string(what) + " needs kind four_level");
    }
}

inline void add_point_checks(RunContext& ctx, const SteadyReport& r)
{
    for (auto c : check_invariants(r, ctx.cfg.baths)) ctx.checks.push_back(std::move(c));
}

// Conservation and second law across a set of sweep rows.
inline void add_curve_checks(RunContext& ctx, const std::string& prefix, const std::vector<SweepRow>& rows,
                             const ModelParams& p, const BathSet& baths)
{
    double gamma = 0.0;
    for (Bath b : kAllBaths) gamma = std::max(gamma, baths[b].gamma);
    const double floor = kConservationAbsFloor * gamma * p.omega_h * p.omega_h * p.omega_h;
    double worst_ratio = 0.0;
    double worst_excess = 0.0;
    double min_entropy = 0.0;
    std::size_t unsolved = 0;
    for (const auto& r : rows) {
        if (!r.ok()) {
            ++unsolved;
            continue;
        }
        double qmax = 0.0;
        double qsum = 0.0;
        for (Bath b : kAllBaths) {
            qmax = std::max(qmax, std::abs(r.currents[b]));
            qsum += r.currents[b];
        }
        const double bound = kConservationRelTol * qmax + floor;
        worst_ratio = std::max(worst_ratio, std::abs(qsum) / bound);
        worst_excess = std::max(worst_excess, std::abs(qsum));
        min_entropy = std::min(min_entropy, r.entropy_rate);
    }
    ctx.checks.push_back({prefix + "current_conservation", worst_ratio <= 1.0, worst_excess,
                          kConservationRelTol});
    ctx.checks.push_back({prefix + "second_law", min_entropy >= -kSecondLawTol, min_entropy, -kSecondLawTol});
    if (unsolved > 0) {
        ctx.warnings.push_back(prefix + std::to_string(unsolved) + " sweep point(s) without a unique steady state");
    }
}

inline std::vector<std::string> sweep_header()
{
    return {"omega_c", "Qdot_w", "Qdot_h", "Qdot_c", "cop", "dS", "cooling", "dS_plus", "dS_minus", "dS_leak",
            "solved"};
}

inline void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows)
{
    CsvWriter csv(path, sweep_header());
    for (const auto& r : rows) {
        if (!r.ok()) {
            csv.row({r.omega_c, {}, {}, {}, {}, {}, {}, {}, {}, {}, 0.0});
            continue;
        }
        std::optional<double> sp, sm, sl;
        if (r.shares) {
            sp = r.shares->plus;
            sm = r.shares->minus;
            sl = r.shares->leak;
        }
        csv.row({r.omega_c, r.currents[Bath::w], r.currents[Bath::h], r.currents[Bath::c], r.cop, r.entropy_rate,
                 r.cooling ? 1.0 : 0.0, sp, sm, sl, 1.0});
    }
}

inline void write_channels_csv(const std::string& path, const Liouvillian& l)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "bath,omega,rate_down,rate_up,transitions\n";
    for (Bath b : kAllBaths) {
        for (const auto& ch : l.channels[b]) {
            out << to_string(b) << ',' << format_double(ch.omega) << ',' << format_double(ch.rate_down) << ','
                << format_double(ch.rate_up) << ',' << ch.transitions.size() << '\n';
        }
    }
}

inline SteadyReport baseline(RunContext& ctx)
{
    const SteadyReport r = solve_steady(build_model(ctx.cfg.kind, ctx.cfg.params), ctx.cfg.baths);
    add_point_checks(ctx, r);
    return r;
}

inline void run_steady(RunContext& ctx)
{
    const SystemModel model = build_model(ctx.cfg.kind, ctx.cfg.params);
    const SteadyReport r = solve_steady(model, ctx.cfg.baths);
    add_point_checks(ctx, r);
    json j = to_json(r, ctx.cfg.baths);
    j["warnings"] = model.warnings;
    write_json(ctx.path("steady.json"), j);
    ctx.summary["cooling"] = r.cooling;
    ctx.note("steady: Q_c = " + format_double(r.currents[Bath::c]) + (r.cooling ? " (cooling)" : " (not cooling)"));
}

inline void write_breakdown_csv(const std::string& path, const BreakdownVerification& v)
{
    std::vector<std::string> header{"omega_c", "I_plus", "I_minus", "I_leak"};
    for (Bath b : kAllBaths) {
        for (const char* s : {"plus", "minus", "leak", "total"}) {
            header.push_back("Qdot_" + std::string(to_string(b)) + "_" + s);
        }
    }
    for (const char* s : {"plus", "minus", "leak", "total"}) header.push_back(std::string("dS_") + s);
    CsvWriter csv(path, header);
    for (const auto& row : v.rows) {
        std::vector<std::optional<double>> f{row.omega_c, row.stages.i_plus, row.stages.i_minus, row.stages.i_leak};
        for (Bath b : kAllBaths) {
            for (Stage s : kAllStages) f.push_back(row.stages.currents(s)[b]);
            f.push_back(row.total[b]);
        }
        for (Stage s : kAllStages) f.push_back(row.stages.entropy(s));
        f.push_back(row.total_entropy);
        csv.row(f);
    }
}

inline void add_breakdown_checks(RunContext& ctx, const BreakdownVerification& v)
{
    ctx.checks.push_back({"breakdown_identity", v.max_relative_error <= kBreakdownTol, v.max_relative_error,
                          kBreakdownTol});
    ctx.checks.push_back({"stage_second_law", v.entropy_ok, v.entropy_ok ? 1.0 : 0.0, 1.0});
    ctx.checks.push_back({"leak_direction", v.leak_sign_ok, v.leak_sign_ok ? 1.0 : 0.0, 1.0});
    ctx.checks.push_back({"stage_cooling_windows", v.signs_ok, v.signs_ok ? 1.0 : 0.0, 1.0});
}

inline void run_breakdown(RunContext& ctx)
{
    require_four_level(ctx.cfg, "breakdown");
    baseline(ctx);
    const Range& r = ctx.cfg.breakdown;
    const auto v = verify_breakdown(ctx.cfg.params, ctx.cfg.baths, linspace(r.lo, r.hi, r.n));
    add_breakdown_checks(ctx, v);
    write_breakdown_csv(ctx.path("breakdown.csv"), v);
    ctx.summary["bracket_pairing"] = to_string(v.pairing);
    ctx.summary["max_relative_error"] = v.max_relative_error;
    ctx.note("breakdown: " + std::to_string(v.rows.size()) + " points, max relative error " +
             format_double(v.max_relative_error));
}

inline void run_diagnose(RunContext& ctx)
{
    const SystemModel model = build_model(ctx.cfg.kind, ctx.cfg.params);
    const DiagnosisReport d = diagnose(model, ctx.cfg.baths);
    write_json(ctx.path("diagnosis.json"), to_json(d));
    ctx.summary["endoreversible"] = d.endoreversible;
    ctx.note("diagnose: " + std::to_string(d.transitions.size()) + " transitions, " +
             std::to_string(d.stages.size()) + " stage class(es), " + std::to_string(d.realization_count()) +
             " realization(s), " + std::to_string(d.stage_pairs.size()) + " pair(s), " +
             (d.endoreversible ? "endoreversible" : "irreversible"));
}

inline double default_duration(const RunConfig& cfg)
{
    const double wh = cfg.params.omega_h;
    return 1e5 / (cfg.baths[Bath::h].gamma * wh * wh * wh);
}

inline json z_score(const MeanError& m, double reference)
{
    const double z = m.error > 0.0 ? (m.mean - reference) / m.error : 0.0;
    return json{{"reference", reference}, {"estimate", m.mean}, {"stderr", m.error}, {"z", z}};
}

inline void run_mcwf(RunContext& ctx)
{
    const SystemModel model = build_model(ctx.cfg.kind, ctx.cfg.params);
    const SteadyReport ref = solve_steady(model, ctx.cfg.baths);
    add_point_checks(ctx, ref);
    const double duration = ctx.cfg.mcwf_duration.value_or(default_duration(ctx.cfg));
    const CurrentEstimate est =
        estimate_currents(model, ctx.cfg.baths, ctx.cfg.mcwf_trajectories, duration, ctx.cfg.seed);

    json j = to_json(est);
    json& cmp = j["comparison"];
    for (Bath b : kAllBaths) cmp["Q_" + std::string(to_string(b))] = z_score(est.currents[b], ref.currents[b]);
    for (std::size_t k = 0; k < est.occupation.size(); ++k) {
        cmp["occupation"].push_back(z_score(est.occupation[k], ref.populations(static_cast<Eigen::Index>(k))));
    }
    if (ctx.cfg.kind == ModelKind::FourLevel) {
        const StageBreakdown s = stage_breakdown(model, ctx.cfg.baths);
        cmp["I_plus"] = z_score(est.i_plus, s.i_plus);
        cmp["I_minus"] = z_score(est.i_minus, s.i_minus);
        cmp["I_leak"] = z_score(est.i_leak, s.i_leak);
    }
    j["reference"] = to_json(ref, ctx.cfg.baths);
    j["reference"].erase("state");
    write_json(ctx.path("mcwf.json"), j);
    ctx.note("mcwf: " + std::to_string(est.n_trajectories) + " trajectories, " + std::to_string(est.jumps) +
             " jumps, Q_c = " + format_double(est.currents[Bath::c].mean) + " +- " +
             format_double(est.currents[Bath::c].error) + " (reference " + format_double(ref.currents[Bath::c]) +
             ")");
}

inline void run_sweep(RunContext& ctx)
{
    const Range& r = ctx.cfg.sweep;
    const auto rows = characteristic_curve(ctx.cfg.kind, ctx.cfg.params, ctx.cfg.baths, r.lo, r.hi, r.n,
                                           ctx.cfg.sweep_edge_points);
    add_curve_checks(ctx, "", rows, ctx.cfg.params, ctx.cfg.baths);
    write_sweep_csv(ctx.path("sweep.csv"), rows);
    ctx.note("sweep: " + std::to_string(rows.size()) + " points");
}

inline void run_optimize(RunContext& ctx)
{
    baseline(ctx);
    const Range& r = ctx.cfg.optimize;
    const OptimumReport o = optimize_cooling(ctx.cfg.kind, ctx.cfg.params, ctx.cfg.baths, r.lo, r.hi, r.n);
    ctx.checks.push_back({"endoreversible_cop_bound", o.bound_satisfied, o.epsilon_star, o.bound});
    write_json(ctx.path("optimum.json"), to_json(o));
    ctx.note("optimize: omega_c* = " + format_double(o.omega_c_star) + ", eps* = " + format_double(o.epsilon_star) +
             " (bound " + format_double(o.bound) + ")");
}

inline std::string g_tag(double g)
{
    std::string s = format_double(g);
    for (char& c : s) {
        if (c == '.') c = 'p';
    }
    return s;
}

inline void run_reproduction(RunContext& ctx)
{
    require_four_level(ctx.cfg, "repro-fig2");
    const RunConfig& cfg = ctx.cfg;
    const Range& r = cfg.sweep;
    json curves = json::array();
    for (double g : cfg.repro_g) {
        ModelParams p = cfg.params;
        p.g = g;
        const auto rows = characteristic_curve(ModelKind::FourLevel, p, cfg.baths, r.lo, r.hi, cfg.repro_points,
                                               cfg.sweep_edge_points);
        add_curve_checks(ctx, "closed_g" + g_tag(g) + "_", rows, p, cfg.baths);
        write_sweep_csv(ctx.path("closed_g" + g_tag(g) + ".csv"), rows);
        curves.push_back({{"g", g}, {"filter", "flat"}, {"points", rows.size()}});
    }

    // Open curve: the work bath only passes frequencies up to omega_w.
    ModelParams p = cfg.params;
    p.g = cfg.repro_open_g;
    BathSet open_baths = cfg.baths;
    open_baths[Bath::w].filter = TrackingCutoff{0.0};
    const auto open_rows = characteristic_curve(ModelKind::FourLevel, p, open_baths, r.lo, r.hi, cfg.repro_points,
                                                cfg.sweep_edge_points);
    add_curve_checks(ctx, "open_g" + g_tag(p.g) + "_", open_rows, p, open_baths);
    write_sweep_csv(ctx.path("open_g" + g_tag(p.g) + ".csv"), open_rows);
    curves.push_back({{"g", p.g}, {"filter", "work-bath cutoff at omega_w"}, {"points", open_rows.size()}});

    const Range& s = cfg.entropy_scan;
    const auto shares = entropy_share_scan(cfg.params, cfg.baths, s.lo, s.hi, s.n);
    {
        CsvWriter csv(ctx.path("entropy_scan.csv"), {"omega_c", "dS_plus", "dS_minus", "dS_leak", "dS_total"});
        for (const auto& row : shares) csv.row({row.omega_c, row.plus, row.minus, row.leak, row.total});
    }
    double worst = 0.0;
    for (const auto& row : shares) {
        const double sum = row.plus + row.minus + row.leak;
        const double scale = std::max({std::abs(row.total), std::abs(sum), 1e-300});
        worst = std::max(worst, std::abs(sum - row.total) / scale);
    }
    ctx.checks.push_back({"entropy_share_sum", worst <= 1e-8, worst, 1e-8});
    ctx.summary["curves"] = curves;
    ctx.note("repro-fig2: " + std::to_string(ctx.outputs.size()) + " CSV files");
}

// Invariant suite only: steady state at the configured point, conservation
// and second law over the sweep grid, and the stage identity for four_level.
inline void run_check_suite(RunContext& ctx)
{
    baseline(ctx);
    const Range& r = ctx.cfg.sweep;
    const auto rows = sweep_characteristic(ctx.cfg.kind, ctx.cfg.params, ctx.cfg.baths, r.lo, r.hi, r.n);
    add_curve_checks(ctx, "sweep_", rows, ctx.cfg.params, ctx.cfg.baths);
    if (ctx.cfg.kind == ModelKind::FourLevel) {
        const Range& b = ctx.cfg.breakdown;
        add_breakdown_checks(ctx, verify_breakdown(ctx.cfg.params, ctx.cfg.baths, linspace(b.lo, b.hi, b.n)));
    }
    std::size_t failed = 0;
    for (const auto& c : ctx.checks) failed += c.pass ? 0 : 1;
    ctx.note("check: " + std::to_string(ctx.checks.size() - failed) + "/" + std::to_string(ctx.checks.size()) +
             " invariants hold");
}

inline json manifest_json(const std::string& sub, const RunConfig& cfg, const RunContext& ctx, int code,
                          const std::string& message, double wall)
{
    json m;
    m["tool"] = "qchill";
    m["version"] = kToolVersion;
    m["subcommand"] = sub;
    m["config_digest"] = config_digest(cfg.source);
    m["config"] = cfg.source;
    m["seed"] = cfg.seed;
    m["exit_code"] = code;
    m["message"] = message;
    m["wall_time_s"] = wall;
    m["checks"] = to_json(ctx.checks);
    m["outputs"] = json::array();
    for (const auto& p : ctx.outputs) m["outputs"].push_back(std::filesystem::path(p).filename().string());
    m["warnings"] = ctx.warnings;
    m["summary"] = ctx.summary;
    return m;
}

} // namespace detail

// Validates the document, dispatches the subcommand and writes the manifest.
// Nothing is written when the configuration is rejected.
inline RunResult run(std::string_view subcommand, const json& document, const RunOptions& options,
                     std::ostream& log)
{
    RunResult result;
    const auto start = std::chrono::steady_clock::now();
    const std::string sub(subcommand);
    if (std::find(subcommands().begin(), subcommands().end(), sub) == subcommands().end()) {
        result.exit_code = kExitConfig;
        result.message = "unknown subcommand '" + sub + "'";
        return result;
    }
    RunConfig cfg;
    try {
        cfg = parse_config(apply_overrides(document, options));
    } catch (const std::invalid_argument& e) {
        result.exit_code = kExitConfig;
        result.message = std::string("invalid configuration: ") + e.what();
        return result;
    }

    detail::RunContext ctx{cfg, std::filesystem::path(cfg.output_dir), options.quiet, log, {}, {}, {}};
    int code = kExitOk;
    std::string message;
    try {
        const SystemModel probe = build_model(cfg.kind, cfg.params);
        ctx.warnings = probe.warnings;
        std::filesystem::create_directories(ctx.dir);
        if (options.dump_channels) {
            detail::write_channels_csv(ctx.path("channels.csv"), build_liouvillian(probe, cfg.baths));
        }
        if (options.check_only) detail::run_check_suite(ctx);
        else if (sub == "steady") detail::run_steady(ctx);
        else if (sub == "breakdown") detail::run_breakdown(ctx);
        else if (sub == "diagnose") detail::run_diagnose(ctx);
        else if (sub == "mcwf") detail::run_mcwf(ctx);
        else if (sub == "sweep") detail::run_sweep(ctx);
        else if (sub == "optimize") detail::run_optimize(ctx);
        else detail::run_reproduction(ctx);
        for (const auto& c : ctx.checks) {
            if (!c.pass) {
                code = kExitInvariant;
                message = "invariant check failed: " + c.name;
                break;
            }
        }
    } catch (const InvariantViolation& e) {
        code = kExitInvariant;
        message = e.what();
    } catch (const SolverError& e) {
        code = kExitSolver;
        message = e.what();
    } catch (const std::invalid_argument& e) {
        code = kExitConfig;
        message = e.what();
    } catch (const std::exception& e) {
        code = kExitIo;
        message = e.what();
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    try {
        std::filesystem::create_directories(ctx.dir);
        const std::string mpath = (ctx.dir / "manifest.json").string();
        write_json(mpath, detail::manifest_json(sub, cfg, ctx, code, message, wall));
        ctx.outputs.push_back(mpath);
    } catch (const std::exception& e) {
        if (code == kExitOk) {
            code = kExitIo;
            message = e.what();
        }
    }
    result.exit_code = code;
    result.message = message;
    result.outputs = ctx.outputs;
    result.checks = ctx.checks;
    return result;
}

} // namespace qchill
