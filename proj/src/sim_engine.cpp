#include "janus/sim_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "janus/error.hpp"
#include "janus/rng.hpp"

namespace janus {

double price_impact(double price, double net_flow, double depth) {
    return price * std::exp(net_flow / depth);
}

StressedParams apply_stress(const std::vector<AssetSpec>& specs, const DemandParams& demand,
                            std::int64_t t, const std::optional<StressOverlay>& overlay) {
    StressedParams out{specs, demand, std::vector<double>(specs.size(), 1.0)};
    if (!overlay || t < overlay->onset || t >= overlay->onset + overlay->duration) return out;
    const double m = overlay->magnitude;
    switch (overlay->kind) {
        case StressKind::CryptoCrash:
            for (std::size_t i = 0; i < out.specs.size(); ++i) {
                if (out.specs[i].kind != AssetKind::Crypto) continue;
                out.specs[i].vol *= 1.0 + m;
                if (t == overlay->onset) out.level_multiplier[i] = std::max(1.0 - m, 1e-9);
            }
            break;
        case StressKind::RwaShortfall:
            for (auto& s : out.specs)
                if (s.kind == AssetKind::Rwa) s.yield *= 1.0 - m;
            break;
        case StressKind::DemandCollapse:
            out.demand.base_inflow *= 1.0 - m;
            break;
    }
    return out;
}

StepShocks draw_shocks(const ScenarioConfig& config, std::size_t path_index, std::int64_t t) {
    const auto step = static_cast<std::uint64_t>(t);
    StepShocks s;
    CounterStream assets(config.seed, path_index, step, StreamPurpose::AssetShocks);
    s.asset_z.resize(config.assets.size());
    for (double& z : s.asset_z) z = assets.normal();
    s.demand_noise = CounterStream(config.seed, path_index, step, StreamPurpose::DemandNoise).normal();
    s.alpha_noise = CounterStream(config.seed, path_index, step, StreamPurpose::AlphaMarketNoise).normal();
    s.omega_noise = CounterStream(config.seed, path_index, step, StreamPurpose::OmegaMarketNoise).normal();
    return s;
}

namespace {

// Backing arbitrage pull: linear inside the anchor width, fading to zero at
// twice the width where market depth is assumed to have withdrawn.
double anchor_support(double deviation, double width) {
    const double a = std::abs(deviation);
    if (a <= width) return deviation;
    const double fade = std::max(0.0, 2.0 * width - a);
    return deviation > 0.0 ? fade : -fade;
}

bool is_floating(const VaultPosition& p) {
    return p.kind == VaultKind::VariableRate || p.kind == VaultKind::BorrowLend;
}

// Moves floating vault principal toward the rate-dependent lock target and
// returns the signed quote amount locked this step.
double adjust_locks(ProtocolState& s, const ScenarioConfig& config, double cap_total) {
    const VaultModel& vm = config.vault_model;
    if (vm.lock_speed == 0.0) return 0.0;
    double floating = 0.0;
    for (const auto& p : s.vault_book.positions)
        if (is_floating(p)) floating += p.principal;
    const double share =
        std::max(0.0, vm.lock_base + vm.lock_elasticity * (s.var_rate - config.controller.rate_neutral));
    double delta = vm.lock_speed * (share * cap_total - floating);
    if (floating + delta < 0.0) delta = -floating;
    if (delta == 0.0) return 0.0;
    if (floating > 0.0) {
        const double scale = (floating + delta) / floating;
        for (auto& p : s.vault_book.positions)
            if (is_floating(p)) p.principal *= scale;
    } else {
        s.vault_book.positions.push_back(VaultPosition::make(VaultKind::VariableRate, delta, 0.0));
    }
    s.vault_book.refresh_total();
    return delta;
}

void manage_treasury(ProtocolState& s, const ScenarioConfig& config, double p_ref) {
    const TreasuryParams& tr = config.treasury;
    if (tr.release_rate > 0.0) {
        const double target = config.target_collateral_ratio() * s.token_supply() * p_ref;
        const double surplus = s.c_total - target;
        if (surplus > 0.0) remove_collateral(s, tr.release_rate * surplus);
    }
    if (tr.rebalance_rate > 0.0 && s.c_total > 0.0) {
        const double total = s.c_total;
        for (auto& h : s.collateral)
            h.value += tr.rebalance_rate * (tr.target_weights[h.asset_id] * total - h.value);
        s.refresh_totals();
    }
}

}  // namespace

StepOutcome transition(const ProtocolState& state, const ScenarioConfig& config,
                       const StepShocks& shocks) {
    StepOutcome out{state, 0.0, {}};
    ProtocolState& s = out.state;
    const std::int64_t t = state.time_step + 1;
    const double p_ref = reference_price(config.ref_policy, t);
    const StressedParams stressed = apply_stress(config.assets, config.demand, t, config.stress);

    if (s.pending_vault_payout > 0.0) {
        remove_collateral(s, s.pending_vault_payout);
        s.pending_vault_payout = 0.0;
    }

    // Collateral assets.
    const auto returns = asset_log_returns(stressed.specs, config.correlation.factor(), shocks.asset_z);
    double crypto_shock = 0.0;
    double crypto_weight = 0.0;
    for (auto& h : s.collateral) {
        const AssetSpec& spec = stressed.specs[h.asset_id];
        const double level = stressed.level_multiplier[h.asset_id];
        if (h.kind == AssetKind::Crypto) {
            const double surprise = returns[h.asset_id] - (spec.drift - 0.5 * spec.vol * spec.vol);
            crypto_shock += h.value * (surprise + std::log(level));
            crypto_weight += h.value;
        }
        const double growth = level * std::exp(returns[h.asset_id]);
        h.asset_price *= growth;
        h.value *= growth;
    }
    crypto_shock = crypto_weight > 0.0 ? crypto_shock / crypto_weight : 0.0;
    s.refresh_totals();

    // Yield and vault interest.
    YieldResult y = accrue_rwa_yield(s, stressed.specs, config.treasury.treasury_split);
    s = std::move(y.state);
    s.omega_reward = y.omega_reward;
    VaultAccrualResult va = accrue_vault_interest(s.vault_book, s.var_rate, t);
    s.vault_book = std::move(va.book);
    for (double r : va.redemptions) s.pending_vault_payout += r;

    // Issuance and redemption at current token prices.
    const MintPolicy& policy = config.mint_policy;
    const DemandParams& demand = stressed.demand;
    const double fee_factor =
        std::max(0.0, 1.0 - demand.redeem_fee_elasticity * (s.fee_rate - policy.redeem_fee));
    const double shares[2] = {policy.alpha_omega_split, 1.0 - policy.alpha_omega_split};
    TokenState* tokens[2] = {&s.alpha, &s.omega};
    double inflow[2]{}, outflow[2]{};
    for (int k = 0; k < 2; ++k) {
        const TokenState& tok = *tokens[k];
        const double nd =
            shares[k] * net_demand(tok.price, p_ref, tok.trend, demand, shocks.demand_noise);
        inflow[k] = std::max(nd, 0.0);
        outflow[k] = (std::max(-nd, 0.0) + demand.churn * tok.supply * tok.price) * fee_factor;
    }
    double issuance_flow[2]{};
    for (int k = 0; k < 2; ++k) {
        if (!(inflow[k] > 0.0) || !(tokens[k]->price > 0.0)) continue;
        MintPolicy single = policy;
        single.alpha_omega_split = k == 0 ? 1.0 : 0.0;
        const MintResult m = mint(s, single, inflow[k]);
        s = m.state;
        issuance_flow[k] += (k == 0 ? m.alpha_minted : m.omega_minted) * tokens[k]->price;
    }
    {
        MintPolicy redemption = policy;
        redemption.redeem_fee = std::clamp(s.fee_rate, 0.0, 0.2);
        double burn[2]{};
        for (int k = 0; k < 2; ++k)
            if (tokens[k]->price > 0.0)
                burn[k] = std::min(tokens[k]->supply, outflow[k] / tokens[k]->price);
        const double prices[2] = {s.alpha.price, s.omega.price};
        if (burn[0] > 0.0 || burn[1] > 0.0) s = redeem(s, redemption, burn[0], burn[1]).state;
        for (int k = 0; k < 2; ++k) issuance_flow[k] -= burn[k] * prices[k];
    }
    out.net_inflow = issuance_flow[0] + issuance_flow[1];

    // Reward emissions are sold into the market.
    double emission_sales[2]{};
    for (int k = 0; k < 2; ++k) {
        const double emitted = s.reward_rate * tokens[k]->supply;
        tokens[k]->supply += emitted;
        emission_sales[k] = emitted * tokens[k]->price;
    }

    const double caps[2] = {s.alpha.supply * s.alpha.price, s.omega.supply * s.omega.price};
    const double cap_total = caps[0] + caps[1];
    const double locked = adjust_locks(s, config, cap_total);

    manage_treasury(s, config, p_ref);

    // Token prices.
    const auto ratio = collateral_ratio(s, p_ref);
    const double backing = ratio ? std::min(1.0, *ratio) : 1.0;
    const double distributed_yield = caps[1] > 0.0 ? s.omega_reward / caps[1] : 0.0;
    const TokenMarket* markets[2] = {&config.alpha_market, &config.omega_market};
    const double noises[2] = {shocks.alpha_noise, shocks.omega_noise};
    for (int k = 0; k < 2; ++k) {
        TokenState& tok = *tokens[k];
        const TokenMarket& mk = *markets[k];
        if (!(tok.price > 0.0)) {
            tok.trend = 0.0;
            continue;
        }
        const double dev = (tok.price - p_ref) / p_ref;
        const double yield_pull = k == 1 ? std::min(1.0, mk.yield_anchor * distributed_yield) : 0.0;
        const double log_move = -mk.anchor_gain * backing * anchor_support(dev, mk.anchor_width) -
                                yield_pull * dev + mk.crypto_beta * crypto_shock +
                                mk.noise_vol * noises[k];
        const double lock_flow = cap_total > 0.0 ? locked * caps[k] / cap_total : 0.0;
        const double flow = (1.0 - mk.absorption) * issuance_flow[k] - emission_sales[k] + lock_flow;
        const double next = price_impact(tok.price, flow + mk.depth * log_move, mk.depth);
        tok.trend = next / tok.price - 1.0;
        tok.price = next;
    }

    if (config.liquidation.enabled)
        s = liquidate(s, policy, p_ref, config.liquidation.penalty, config.liquidation.omega_senior).state;

    // Control: relax toward the resting values, then act on the token
    // furthest from the reference.
    const ControllerParams& cp = config.controller;
    const double lambda = cp.relaxation;
    s.fee_rate += lambda * (cp.fee_neutral - s.fee_rate);
    s.reward_rate += lambda * (cp.reward_neutral - s.reward_rate);
    s.var_rate += lambda * (cp.rate_neutral - s.var_rate);
    const double worst_price =
        std::abs(s.alpha.price - p_ref) >= std::abs(s.omega.price - p_ref) ? s.alpha.price
                                                                            : s.omega.price;
    if (worst_price > 0.0) {
        out.action = control_action(worst_price, p_ref, config.band, cp,
                                    {s.fee_rate, s.reward_rate, s.var_rate});
        s.fee_rate += out.action.fee_delta;
        s.reward_rate += out.action.reward_delta;
        s.var_rate += out.action.rate_delta;
    }

    s.time_step = t;
    return out;
}

namespace {
bool finite_state(const ProtocolState& s) {
    for (double v : {s.alpha.price, s.alpha.supply, s.alpha.trend, s.omega.price, s.omega.supply,
                     s.omega.trend, s.c_total, s.fee_rate, s.reward_rate, s.var_rate,
                     s.vault_book.total_locked})
        if (!std::isfinite(v)) return false;
    return true;
}
}  // namespace

SimTrace simulate_path(const ScenarioConfig& config, std::size_t path_index) {
    SimTrace trace;
    trace.records.reserve(static_cast<std::size_t>(config.horizon));
    ProtocolState state = initial_protocol_state(config);
    const std::int64_t needed_streak = std::max<std::int64_t>(config.failure.grace, 1);
    std::int64_t streak = 0;

    for (std::int64_t step = 0; step < config.horizon; ++step) {
        const StepShocks shocks = draw_shocks(config, path_index, state.time_step + 1);
        StepOutcome next;
        bool ok = true;
        try {
            next = transition(state, config, shocks);
            ok = finite_state(next.state);
        } catch (const NumericalError&) {
            ok = false;
        }
        if (!ok) {
            trace.diverged = true;
            if (!trace.failed) trace.failure_step = state.time_step + 1;
            trace.failed = true;
            if (!trace.records.empty()) trace.records.back().failed = true;
            break;
        }
        state = std::move(next.state);

        SimRecord r;
        r.t = state.time_step;
        r.p_a = state.alpha.price;
        r.p_omega = state.omega.price;
        r.p_ref = reference_price(config.ref_policy, r.t);
        const Band b = band_bounds(r.p_ref, config.band);
        r.band_lo = b.lo;
        r.band_hi = b.hi;
        r.supply_a = state.alpha.supply;
        r.supply_omega = state.omega.supply;
        r.c_total = state.c_total;
        r.v1 = state.crypto_value;
        r.v2 = state.rwa_value;
        r.net_inflow = next.net_inflow;
        r.fee_rate = state.fee_rate;
        r.reward_rate = state.reward_rate;
        r.var_rate = state.var_rate;
        r.action = next.action;
        r.in_band = r.p_a >= b.lo && r.p_a <= b.hi && r.p_omega >= b.lo && r.p_omega <= b.hi;

        streak = r.in_band ? 0 : streak + 1;
        const auto ratio = collateral_ratio(state, r.p_ref);
        const double floor_price = config.failure.floor * r.p_ref;
        const bool failed_now = streak >= needed_streak || (ratio && *ratio < 1.0) ||
                                r.p_a <= floor_price || r.p_omega <= floor_price;
        if (failed_now && !trace.failed) {
            trace.failed = true;
            trace.failure_step = r.t;
        }
        r.failed = trace.failed;
        trace.records.push_back(r);
    }
    trace.final_state = std::move(state);
    return trace;
}

PathSummary summarize_path(const SimTrace& trace, const ScenarioConfig& config) {
    PathSummary p;
    p.failed = trace.failed;
    p.failure_step = trace.failure_step;
    p.steps = trace.records.size();
    std::size_t counted = 0, inside = 0, e_count = 0;
    double e_sum = 0.0;
    for (const auto& r : trace.records) {
        if (r.t > config.burn_in) {
            ++counted;
            if (r.in_band) ++inside;
        }
        if (const auto e = capital_efficiency(r.supply_a + r.supply_omega, r.p_ref, r.c_total)) {
            e_sum += *e;
            ++e_count;
        }
    }
    p.in_band_fraction = counted ? static_cast<double>(inside) / static_cast<double>(counted) : 0.0;
    p.mean_capital_efficiency = e_count ? e_sum / static_cast<double>(e_count) : 0.0;
    if (!trace.records.empty()) {
        const SimRecord& last = trace.records.back();
        p.terminal_p_a = last.p_a;
        p.terminal_p_omega = last.p_omega;
        p.terminal_p_ref = last.p_ref;
        p.terminal_minted_notional = (last.supply_a + last.supply_omega) * last.p_ref;
        p.terminal_v1 = last.v1;
        p.terminal_v2 = last.v2;
    }
    if (trace.records.size() >= 30) p.inflow_dependence = inflow_dependence(trace);
    return p;
}

std::vector<PathSummary> run_paths(const ScenarioConfig& config, std::size_t n_paths,
                                   std::size_t workers, std::size_t first_index) {
    std::vector<PathSummary> out(n_paths);
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n_paths, 1));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n_paths; i = next++) {
            try {
                out[i] = summarize_path(simulate_path(config, first_index + i), config);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);
    return out;
}

namespace {
double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}
}  // namespace

EnsembleSummary summarize_ensemble(std::vector<PathSummary> paths, const ScenarioConfig& config) {
    EnsembleSummary e;
    e.n_paths = paths.size();
    if (paths.empty()) return e;
    const double n = static_cast<double>(paths.size());
    std::vector<double> pa, po;
    double dep_sum = 0.0;
    std::size_t dep_count = 0, above_floor = 0;
    for (const auto& p : paths) {
        if (p.failed) ++e.failures;
        e.mean_in_band_fraction += p.in_band_fraction;
        e.mean_capital_efficiency += p.mean_capital_efficiency;
        e.mean_terminal_p_a += p.terminal_p_a;
        e.mean_terminal_p_omega += p.terminal_p_omega;
        e.mean_terminal_p_ref += p.terminal_p_ref;
        e.mean_minted_notional += p.terminal_minted_notional;
        e.mean_v1 += p.terminal_v1;
        e.mean_v2 += p.terminal_v2;
        pa.push_back(p.terminal_p_a);
        po.push_back(p.terminal_p_omega);
        if (p.terminal_p_omega >= config.failure.floor * p.terminal_p_ref) ++above_floor;
        if (p.inflow_dependence) {
            dep_sum += *p.inflow_dependence;
            ++dep_count;
        }
    }
    for (double* v : {&e.mean_in_band_fraction, &e.mean_capital_efficiency, &e.mean_terminal_p_a,
                      &e.mean_terminal_p_omega, &e.mean_terminal_p_ref, &e.mean_minted_notional,
                      &e.mean_v1, &e.mean_v2})
        *v /= n;
    e.median_terminal_p_a = median(std::move(pa));
    e.median_terminal_p_omega = median(std::move(po));
    e.omega_floor_fraction = static_cast<double>(above_floor) / n;
    e.p_hat = static_cast<double>(e.failures) / n;
    e.ci = wilson_interval(e.failures, e.n_paths);
    e.ponzi.anchor_margin = ponzi_anchor_check(e.mean_minted_notional, e.mean_v1, e.mean_v2);
    if (dep_count) e.ponzi.inflow_dependence = dep_sum / static_cast<double>(dep_count);
    e.ponzi.verdict = ponzi_verdict(e.ponzi.anchor_margin, e.ponzi.inflow_dependence);
    e.paths = std::move(paths);
    return e;
}

EnsembleSummary monte_carlo(const ScenarioConfig& config, std::size_t n_paths, std::size_t workers) {
    if (n_paths == 0) throw ValidationError("n_paths", "must be >= 1");
    return summarize_ensemble(run_paths(config, n_paths, workers), config);
}

ScenarioConfig apply_grid_cell(const ScenarioConfig& base, std::optional<double> min_ratio,
                               std::optional<double> epsilon, std::optional<double> gain_scale,
                               const std::optional<std::vector<double>>& theta) {
    ScenarioConfig c = base;
    if (min_ratio) {
        if (!(*min_ratio >= 1.0)) throw ValidationError("grid.min_collateral_ratio", "must be >= 1");
        // The same collateral supports proportionally fewer tokens.
        const double scale = base.mint_policy.min_collateral_ratio / *min_ratio;
        c.mint_policy.min_collateral_ratio = *min_ratio;
        c.initial_state.alpha.supply *= scale;
        c.initial_state.omega.supply *= scale;
    }
    if (epsilon) c.band.epsilon = *epsilon;
    if (gain_scale) {
        c.controller.fee_gain *= *gain_scale;
        c.controller.reward_gain *= *gain_scale;
        c.controller.rate_gain *= *gain_scale;
    }
    if (theta) {
        if (theta->size() != c.assets.size())
            throw ValidationError("grid.theta", "one weight per asset required");
        double total = 0.0;
        for (double v : c.initial_state.collateral_values) total += v;
        c.treasury.target_weights = *theta;
        for (std::size_t i = 0; i < theta->size(); ++i)
            c.initial_state.collateral_values[i] = total * (*theta)[i];
    }
    c.validate();
    return c;
}

bool dominates(const TrilemmaPoint& a, const TrilemmaPoint& b) {
    const bool all_ge = a.d >= b.d && a.e >= b.e && a.s >= b.s;
    const bool any_gt = a.d > b.d || a.e > b.e || a.s > b.s;
    return all_ge && any_gt;
}

void mark_pareto(std::vector<FrontierPoint>& points) {
    for (auto& p : points) {
        p.pareto = std::none_of(points.begin(), points.end(),
                                [&](const FrontierPoint& q) { return dominates(q.point, p.point); });
    }
}

std::vector<FrontierPoint> frontier_sweep(
    const ScenarioConfig& base, const FrontierGrid& grid, std::size_t n_paths, std::size_t workers,
    const std::vector<std::pair<std::string, ScenarioConfig>>& extra_cells) {
    if (grid.empty() && extra_cells.empty()) throw ValidationError("grid", "grid has no cells");
    std::vector<FrontierPoint> points;

    const auto evaluate = [&](const std::string& label, const ScenarioConfig& cfg, double gain) {
        FrontierPoint fp;
        fp.label = label;
        fp.min_collateral_ratio = cfg.mint_policy.min_collateral_ratio;
        fp.epsilon = cfg.band.epsilon;
        fp.gain_scale = gain;
        fp.theta = cfg.treasury.target_weights;
        fp.point = trilemma_point(cfg.governance, monte_carlo(cfg, n_paths, workers), label);
        points.push_back(std::move(fp));
    };

    if (!grid.empty()) {
        using Opt = std::optional<double>;
        const auto axis = [](const std::vector<double>& v) {
            std::vector<Opt> out(v.begin(), v.end());
            if (out.empty()) out.push_back(std::nullopt);
            return out;
        };
        std::vector<std::optional<std::vector<double>>> thetas(grid.theta.begin(), grid.theta.end());
        if (thetas.empty()) thetas.push_back(std::nullopt);
        std::size_t cell = 0;
        for (const Opt& mr : axis(grid.min_collateral_ratio))
            for (const Opt& eps : axis(grid.epsilon))
                for (const Opt& g : axis(grid.controller_gain_scale))
                    for (const auto& th : thetas) {
                        const ScenarioConfig cfg = apply_grid_cell(base, mr, eps, g, th);
                        evaluate("cell" + std::to_string(cell++), cfg, g.value_or(1.0));
                    }
    }
    for (const auto& [label, cfg] : extra_cells) evaluate(label, cfg, 1.0);
    mark_pareto(points);
    return points;
}

}  // namespace janus
