#include "janus/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "janus/config_io.hpp"
#include "janus/error.hpp"

#ifndef JANUS_BUILD_ID
#define JANUS_BUILD_ID "janus-0.1.0"
#endif

namespace janus::cli {

using nlohmann::json;

const std::vector<std::string>& trace_columns() {
    static const std::vector<std::string> cols{
        "t",       "p_a",      "p_omega",      "p_ref",      "band_lo", "band_hi",
        "supply_a", "supply_omega", "c_total", "v1",         "v2",      "net_inflow",
        "fee_rate", "reward_rate",  "var_rate", "in_band",   "failed"};
    return cols;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string trace_csv(const SimTrace& trace) {
    std::string out;
    const auto& cols = trace_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) out += ',';
        out += cols[i];
    }
    out += '\n';
    for (const SimRecord& r : trace.records) {
        out += std::to_string(r.t);
        for (double v : {r.p_a, r.p_omega, r.p_ref, r.band_lo, r.band_hi, r.supply_a,
                         r.supply_omega, r.c_total, r.v1, r.v2, r.net_inflow, r.fee_rate,
                         r.reward_rate, r.var_rate}) {
            out += ',';
            out += format_double(v);
        }
        out += r.in_band ? ",1" : ",0";
        out += r.failed ? ",1\n" : ",0\n";
    }
    return out;
}

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json ponzi_json(const PonziReport& p) {
    return {{"anchor_margin", p.anchor_margin},
            {"inflow_dependence", optional_json(p.inflow_dependence)},
            {"verdict", to_string(p.verdict)}};
}

json interval_json(const Interval& i) { return json::array({i.lo, i.hi}); }

}  // namespace

json path_json(const PathSummary& p) {
    return {{"in_band_fraction", p.in_band_fraction},
            {"failed", p.failed},
            {"failure_step", p.failure_step ? json(*p.failure_step) : json(nullptr)},
            {"terminal_p_a", p.terminal_p_a},
            {"terminal_p_omega", p.terminal_p_omega},
            {"terminal_p_ref", p.terminal_p_ref},
            {"terminal_minted_notional", p.terminal_minted_notional},
            {"terminal_v1", p.terminal_v1},
            {"terminal_v2", p.terminal_v2},
            {"mean_capital_efficiency", p.mean_capital_efficiency},
            {"inflow_dependence", optional_json(p.inflow_dependence)},
            {"steps", p.steps}};
}

json summary_json(const std::string& label, const ScenarioConfig& config, const SimTrace& trace,
                  const PathSummary& path) {
    PonziReport ponzi;
    ponzi.anchor_margin = ponzi_anchor_check(path.terminal_minted_notional, path.terminal_v1,
                                             path.terminal_v2);
    ponzi.inflow_dependence = path.inflow_dependence;
    ponzi.verdict = ponzi_verdict(ponzi.anchor_margin, ponzi.inflow_dependence);
    return {{"config", label},
            {"seed", config.seed},
            {"horizon", config.horizon},
            {"burn_in", config.burn_in},
            {"rows", trace.records.size()},
            {"failed", trace.failed},
            {"diverged", trace.diverged},
            {"path", path_json(path)},
            {"ponzi", ponzi_json(ponzi)}};
}

json ensemble_json(const std::string& label, const ScenarioConfig& config,
                   const EnsembleSummary& e) {
    const TrilemmaPoint tp = trilemma_point(config.governance, e, label);
    json paths = json::array();
    for (const auto& p : e.paths) paths.push_back(path_json(p));
    return {{"config", label},
            {"seed", config.seed},
            {"n_paths", e.n_paths},
            {"failures", e.failures},
            {"p_hat", e.p_hat},
            {"ci", interval_json(e.ci)},
            {"safety", 1.0 - e.p_hat},
            {"mean_e", e.mean_capital_efficiency},
            {"d", decentralization(config.governance)},
            {"trilemma",
             {{"d", tp.d}, {"e", tp.e}, {"s", tp.s}, {"s_ci", interval_json(tp.s_ci)},
              {"provenance", tp.provenance}}},
            {"ponzi", ponzi_json(e.ponzi)},
            {"mean_in_band_fraction", e.mean_in_band_fraction},
            {"mean_terminal_p_a", e.mean_terminal_p_a},
            {"mean_terminal_p_omega", e.mean_terminal_p_omega},
            {"median_terminal_p_a", e.median_terminal_p_a},
            {"median_terminal_p_omega", e.median_terminal_p_omega},
            {"mean_terminal_p_ref", e.mean_terminal_p_ref},
            {"omega_floor_fraction", e.omega_floor_fraction},
            {"mean_minted_notional", e.mean_minted_notional},
            {"mean_v1", e.mean_v1},
            {"mean_v2", e.mean_v2},
            {"paths", paths}};
}

std::string frontier_csv(const std::vector<FrontierPoint>& points) {
    std::string out = "label,min_collateral_ratio,epsilon,gain_scale,theta,d,e,s,s_lo,s_hi,pareto\n";
    for (const auto& p : points) {
        std::string theta;
        for (std::size_t i = 0; i < p.theta.size(); ++i) {
            if (i) theta += ';';
            theta += format_double(p.theta[i]);
        }
        out += p.label + ',' + format_double(p.min_collateral_ratio) + ',' +
               format_double(p.epsilon) + ',' + format_double(p.gain_scale) + ',' + theta + ',' +
               format_double(p.point.d) + ',' + format_double(p.point.e) + ',' +
               format_double(p.point.s) + ',' + format_double(p.point.s_ci.lo) + ',' +
               format_double(p.point.s_ci.hi) + ',' + (p.pareto ? "1" : "0") + '\n';
    }
    return out;
}

json equilibrium_json(const EquilibriumReport& r) {
    const auto names = layout::names(r.x_star.size() - layout::kFixedEntries);
    json x = json::object();
    for (std::size_t i = 0; i < r.x_star.size(); ++i) x[names[i]] = r.x_star[i];
    return {{"x_star", r.x_star},
            {"state", x},
            {"residual", r.residual},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"spectral_radius", r.spectral_radius},
            {"stability", to_string(r.stability)}};
}

void write_outputs(const std::filesystem::path& dir, const std::vector<OutputFile>& files) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> temps;
    try {
        for (const auto& [name, content] : files) {
            auto tmp = dir / ("." + name + ".tmp");
            std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
            f << content;
            f.close();
            temps.push_back(tmp);
            if (!f) throw Error("failed writing " + tmp.string());
        }
    } catch (...) {
        for (const auto& t : temps) std::filesystem::remove(t);
        throw;
    }
    for (std::size_t i = 0; i < files.size(); ++i)
        std::filesystem::rename(temps[i], dir / files[i].first);
}

namespace {

struct Options {
    std::string config_path;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::size_t paths = 1000;
    std::size_t workers = 0;
    std::string out = ".";
    std::string grid;
    bool controller_off = false;
};

std::size_t resolve_workers(std::size_t requested) {
    if (const char* env = std::getenv("JANUS_SIM_THREADS"); env && *env) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end && *end == '\0' && v > 0) return v;
    }
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

LoadedConfig load(const Options& o) {
    if (o.config_path.empty() == o.preset.empty())
        throw ValidationError("config", "give exactly one of --config or --preset");
    LoadedConfig c = o.preset.empty() ? load_config_file(o.config_path) : load_preset(o.preset);
    if (o.seed) c.config.seed = *o.seed;
    if (o.controller_off) c.config.controller = c.config.controller.disabled();
    return c;
}

json manifest(const std::string& command, const Options& o, const LoadedConfig& c,
              std::size_t n_paths, std::size_t workers, const std::vector<OutputFile>& files,
              double seconds) {
    json outputs = json::array();
    for (const auto& f : files) outputs.push_back(f.first);
    outputs.push_back("manifest.json");
    return {{"command", command},
            {"config", o.preset.empty() ? o.config_path : o.preset},
            {"config_kind", o.preset.empty() ? "file" : "preset"},
            {"config_hash", config_hash(c.source)},
            {"base_seed", c.config.seed},
            {"n_paths", n_paths},
            {"workers", workers},
            {"controller_off", o.controller_off},
            {"grid", o.grid.empty() ? json(nullptr) : json(o.grid)},
            {"build", JANUS_BUILD_ID},
            {"outputs", outputs},
            {"wall_clock_seconds", seconds}};
}

int finish(const std::string& command, const Options& o, const LoadedConfig& c,
           std::size_t n_paths, std::size_t workers, std::vector<OutputFile> files,
           std::chrono::steady_clock::time_point start) {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    files.emplace_back("manifest.json",
                       manifest(command, o, c, n_paths, workers, files, secs).dump(2) + "\n");
    write_outputs(o.out, files);
    return kExitOk;
}

int cmd_run(const Options& o, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    const LoadedConfig c = load(o);
    const SimTrace trace = simulate_path(c.config, 0);
    if (trace.diverged)
        throw NumericalError("simulation produced a non-finite value at step " +
                             std::to_string(trace.records.size() + 1));
    const PathSummary path = summarize_path(trace, c.config);
    std::vector<OutputFile> files{
        {"trace.csv", trace_csv(trace)},
        {"summary.json", summary_json(c.label, c.config, trace, path).dump(2) + "\n"}};
    out << "run " << c.label << ": " << trace.records.size() << " steps, in-band "
        << path.in_band_fraction << (trace.failed ? ", failed" : "") << "\n";
    return finish("run", o, c, 1, 1, std::move(files), start);
}

int cmd_mc(const Options& o, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    const LoadedConfig c = load(o);
    if (o.paths == 0) throw ValidationError("paths", "must be >= 1");
    const std::size_t workers = resolve_workers(o.workers);
    const EnsembleSummary e = monte_carlo(c.config, o.paths, workers);
    std::vector<OutputFile> files{
        {"ensemble.json", ensemble_json(c.label, c.config, e).dump(2) + "\n"}};
    out << "mc " << c.label << ": p_hat " << e.p_hat << " in-band " << e.mean_in_band_fraction
        << " verdict " << to_string(e.ponzi.verdict) << "\n";
    return finish("mc", o, c, o.paths, workers, std::move(files), start);
}

int cmd_frontier(const Options& o, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    const LoadedConfig c = load(o);
    if (o.grid.empty()) throw ValidationError("grid", "--grid is required");
    std::vector<std::string> preset_names;
    const FrontierGrid grid = parse_grid(read_json_file(o.grid), &preset_names);
    std::vector<std::pair<std::string, ScenarioConfig>> extras;
    for (const auto& name : preset_names) {
        ScenarioConfig pc = load_preset(name).config;
        if (o.seed) pc.seed = *o.seed;
        extras.emplace_back(name, std::move(pc));
    }
    const std::size_t workers = resolve_workers(o.workers);
    const auto points = frontier_sweep(c.config, grid, o.paths, workers, extras);
    out << "frontier " << c.label << ": " << points.size() << " cells\n";
    return finish("frontier", o, c, o.paths, workers, {{"frontier.csv", frontier_csv(points)}},
                  start);
}

int cmd_equilibrium(const Options& o, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    const LoadedConfig c = load(o);
    const EquilibriumReport r = analyze_equilibrium(c.config);
    if (!r.converged) throw DivergenceError(r.iterations, r.residual);
    out << "equilibrium " << c.label << ": rho " << r.spectral_radius << " "
        << to_string(r.stability) << "\n";
    return finish("equilibrium", o, c, 0, 1,
                  {{"equilibrium.json", equilibrium_json(r).dump(2) + "\n"}}, start);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"JANUS dual-token stablecoin simulator"};
    app.require_subcommand(1);
    Options o;
    auto add_common = [&](CLI::App* sub) {
        auto* cfg = sub->add_option("--config", o.config_path, "Scenario config file");
        auto* pre = sub->add_option("--preset", o.preset, "Bundled preset name");
        cfg->excludes(pre);
        sub->add_option("--seed", o.seed, "Base seed override");
        sub->add_option("--out", o.out, "Output directory");
        sub->add_flag("--controller-off", o.controller_off, "Disable the feedback controller");
    };
    auto* run_cmd = app.add_subcommand("run", "Simulate one path");
    auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo ensemble");
    auto* fr_cmd = app.add_subcommand("frontier", "Trilemma frontier sweep");
    auto* eq_cmd = app.add_subcommand("equilibrium", "Fixed point and stability");
    for (auto* s : {run_cmd, mc_cmd, fr_cmd, eq_cmd}) add_common(s);
    for (auto* s : {mc_cmd, fr_cmd}) {
        s->add_option("--paths", o.paths, "Number of paths");
        s->add_option("--workers", o.workers, "Worker threads");
    }
    run_cmd->add_option("--workers", o.workers, "Accepted for symmetry; a single path is serial");
    fr_cmd->add_option("--grid", o.grid, "Grid file")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (*run_cmd) return cmd_run(o, out);
        if (*mc_cmd) return cmd_mc(o, out);
        if (*fr_cmd) return cmd_frontier(o, out);
        return cmd_equilibrium(o, out);
    } catch (const ValidationError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DimensionError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DivergenceError& e) {
        err << "divergence: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace janus::cli
