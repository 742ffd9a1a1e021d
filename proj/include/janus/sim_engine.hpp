#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "janus/controller.hpp"
#include "janus/metrics.hpp"
#include "janus/scenario.hpp"

namespace janus {

struct SimRecord {
    std::int64_t t = 0;
    double p_a = 0.0;
    double p_omega = 0.0;
    double p_ref = 0.0;
    double band_lo = 0.0;
    double band_hi = 0.0;
    double supply_a = 0.0;
    double supply_omega = 0.0;
    double c_total = 0.0;
    double v1 = 0.0;
    double v2 = 0.0;
    double net_inflow = 0.0;
    double fee_rate = 0.0;
    double reward_rate = 0.0;
    double var_rate = 0.0;
    ControlAction action;
    bool in_band = false;
    bool failed = false;
};

struct SimTrace {
    std::vector<SimRecord> records;
    bool failed = false;
    std::optional<std::int64_t> failure_step;
    bool diverged = false;  // stopped early on a non-finite value
    ProtocolState final_state;
};

/// price * exp(net_flow / depth).
double price_impact(double price, double net_flow, double depth);

struct StressedParams {
    std::vector<AssetSpec> specs;
    DemandParams demand;
    /// Multiplier applied once to each asset price level this step.
    std::vector<double> level_multiplier;
};

/// Parameters in force at step t. Inside [onset, onset + duration):
/// CryptoCrash drops crypto price levels by `magnitude` at onset and scales
/// crypto vol by (1 + magnitude); RwaShortfall scales RWA yield by
/// (1 - magnitude); DemandCollapse scales base inflow by (1 - magnitude).
StressedParams apply_stress(const std::vector<AssetSpec>& specs, const DemandParams& demand,
                            std::int64_t t, const std::optional<StressOverlay>& overlay);

StepShocks draw_shocks(const ScenarioConfig& config, std::size_t path_index, std::int64_t t);

struct StepOutcome {
    ProtocolState state;
    double net_inflow = 0.0;
    ControlAction action;
};

/// One full step in the frozen sub-step order:
///   settle last step's matured vault payouts, step asset prices (with stress),
///   accrue RWA yield and vault interest, run issuance and redemption at
///   current token prices, move token prices, liquidate, apply the control
///   action. The step is labelled t = state.time_step + 1 and uses P_ref(t).
StepOutcome transition(const ProtocolState& state, const ScenarioConfig& config,
                       const StepShocks& shocks);

SimTrace simulate_path(const ScenarioConfig& config, std::size_t path_index);

struct PathSummary {
    double in_band_fraction = 0.0;  // after burn-in
    bool failed = false;
    std::optional<std::int64_t> failure_step;
    double terminal_p_a = 0.0;
    double terminal_p_omega = 0.0;
    double terminal_p_ref = 0.0;
    double terminal_minted_notional = 0.0;
    double terminal_v1 = 0.0;
    double terminal_v2 = 0.0;
    double mean_capital_efficiency = 0.0;
    std::optional<double> inflow_dependence;
    std::size_t steps = 0;
};

PathSummary summarize_path(const SimTrace& trace, const ScenarioConfig& config);

struct EnsembleSummary {
    std::size_t n_paths = 0;
    std::size_t failures = 0;
    double p_hat = 0.0;
    Interval ci;
    double mean_in_band_fraction = 0.0;
    double mean_capital_efficiency = 0.0;
    double mean_terminal_p_a = 0.0;
    double mean_terminal_p_omega = 0.0;
    double median_terminal_p_a = 0.0;
    double median_terminal_p_omega = 0.0;
    double mean_terminal_p_ref = 0.0;
    /// Share of paths whose terminal Omega price is at least floor * P_ref.
    double omega_floor_fraction = 0.0;
    double mean_minted_notional = 0.0;
    double mean_v1 = 0.0;
    double mean_v2 = 0.0;
    PonziReport ponzi;
    std::vector<PathSummary> paths;
};

/// Simulates paths first_index .. first_index + n_paths - 1.
std::vector<PathSummary> run_paths(const ScenarioConfig& config, std::size_t n_paths,
                                   std::size_t workers, std::size_t first_index = 0);

/// Reduce path summaries in index order.
EnsembleSummary summarize_ensemble(std::vector<PathSummary> paths, const ScenarioConfig& config);

EnsembleSummary monte_carlo(const ScenarioConfig& config, std::size_t n_paths,
                            std::size_t workers = 1);

struct FrontierGrid {
    std::vector<double> min_collateral_ratio;
    std::vector<double> epsilon;
    std::vector<double> controller_gain_scale;
    std::vector<std::vector<double>> theta;

    bool empty() const {
        return min_collateral_ratio.empty() && epsilon.empty() && controller_gain_scale.empty() &&
               theta.empty();
    }
};

struct FrontierPoint {
    std::string label;
    double min_collateral_ratio = 0.0;
    double epsilon = 0.0;
    double gain_scale = 1.0;
    std::vector<double> theta;
    TrilemmaPoint point;
    bool pareto = false;
};

/// Apply one grid cell to a base config. A new collateral ratio rescales the
/// initial token supplies so the initial backing matches the new ratio; theta
/// replaces both the initial collateral split and the treasury target weights.
ScenarioConfig apply_grid_cell(const ScenarioConfig& base, std::optional<double> min_ratio,
                               std::optional<double> epsilon, std::optional<double> gain_scale,
                               const std::optional<std::vector<double>>& theta);

/// True when a is at least as good as b in d, e and s and better in one.
bool dominates(const TrilemmaPoint& a, const TrilemmaPoint& b);
void mark_pareto(std::vector<FrontierPoint>& points);

/// Evaluates every cell of `grid` over `base` plus the labelled extra
/// configs, then marks the non-dominated set.
std::vector<FrontierPoint> frontier_sweep(
    const ScenarioConfig& base, const FrontierGrid& grid, std::size_t n_paths,
    std::size_t workers = 1,
    const std::vector<std::pair<std::string, ScenarioConfig>>& extra_cells = {});

}  // namespace janus
