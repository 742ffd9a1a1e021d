#include "janus/scenario.hpp"

#include <cmath>
#include <string>

#include "janus/error.hpp"

namespace janus {

namespace {
void require(bool ok, const std::string& field, const char* message) {
    if (!ok) throw ValidationError(field, message);
}
void require_bounds(const Bounds& b, const std::string& field) {
    require(std::isfinite(b.min) && std::isfinite(b.max) && b.min <= b.max, field,
            "bounds must be finite with min <= max");
}
}  // namespace

void ControllerParams::validate() const {
    require(fee_gain >= 0.0, "controller.fee_gain", "must be >= 0");
    require(reward_gain >= 0.0, "controller.reward_gain", "must be >= 0");
    require(rate_gain >= 0.0, "controller.rate_gain", "must be >= 0");
    require_bounds(fee_bounds, "controller.fee_bounds");
    require_bounds(reward_bounds, "controller.reward_bounds");
    require_bounds(rate_bounds, "controller.rate_bounds");
    require(fee_bounds.clamp(fee_neutral) == fee_neutral, "controller.fee_neutral",
            "must lie inside fee_bounds");
    require(reward_bounds.clamp(reward_neutral) == reward_neutral, "controller.reward_neutral",
            "must lie inside reward_bounds");
    require(rate_bounds.clamp(rate_neutral) == rate_neutral, "controller.rate_neutral",
            "must lie inside rate_bounds");
    require(relaxation >= 0.0 && relaxation <= 1.0, "controller.relaxation", "must lie in [0, 1]");
}

ControllerParams ControllerParams::disabled() const {
    ControllerParams p = *this;
    p.fee_gain = p.reward_gain = p.rate_gain = 0.0;
    return p;
}

void TokenMarket::validate(const char* field) const {
    const std::string f = field;
    require(depth > 0.0 && std::isfinite(depth), f + ".depth", "must be > 0");
    require(anchor_gain >= 0.0 && anchor_gain <= 1.0, f + ".anchor_gain", "must lie in [0, 1]");
    require(anchor_width > 0.0, f + ".anchor_width", "must be > 0");
    require(yield_anchor >= 0.0, f + ".yield_anchor", "must be >= 0");
    require(noise_vol >= 0.0, f + ".noise_vol", "must be >= 0");
    require(std::isfinite(crypto_beta), f + ".crypto_beta", "must be finite");
    require(absorption >= 0.0 && absorption <= 1.0, f + ".absorption", "must lie in [0, 1]");
}

void TreasuryParams::validate(std::size_t assets) const {
    require(treasury_split >= 0.0 && treasury_split <= 1.0, "treasury.treasury_split",
            "must lie in [0, 1]");
    require(reserve_multiple > 0.0, "treasury.reserve_multiple", "must be > 0");
    require(release_rate >= 0.0 && release_rate <= 1.0, "treasury.release_rate", "must lie in [0, 1]");
    require(rebalance_rate >= 0.0 && rebalance_rate <= 1.0, "treasury.rebalance_rate",
            "must lie in [0, 1]");
    require(target_weights.size() == assets, "treasury.target_weights", "one weight per asset");
    double sum = 0.0;
    for (double w : target_weights) {
        require(w >= 0.0 && w <= 1.0, "treasury.target_weights", "weights must lie in [0, 1]");
        sum += w;
    }
    require(assets == 0 || std::abs(sum - 1.0) <= 1e-9, "treasury.target_weights", "must sum to 1");
}

void VaultModel::validate() const {
    require(lock_base >= 0.0 && lock_base <= 1.0, "vault_model.lock_base", "must lie in [0, 1]");
    require(lock_elasticity >= 0.0, "vault_model.lock_elasticity", "must be >= 0");
    require(lock_speed >= 0.0 && lock_speed <= 1.0, "vault_model.lock_speed", "must lie in [0, 1]");
}

void LiquidationParams::validate() const {
    require(penalty >= 0.0 && penalty <= 1.0, "liquidation.penalty", "must lie in [0, 1]");
}

void StressOverlay::validate(std::int64_t horizon) const {
    require(onset >= 0, "stress.onset", "must be >= 0");
    require(duration >= 0, "stress.duration", "must be >= 0");
    require(onset + duration <= horizon, "stress", "onset + duration must not exceed horizon");
    require(magnitude > 0.0 && magnitude <= 1.0, "stress.magnitude", "must lie in (0, 1]");
}

void FailureDef::validate() const {
    require(grace >= 0, "failure.grace", "must be >= 0");
    require(floor > 0.0 && floor < 1.0, "failure.floor", "must lie in (0, 1)");
}

void ScenarioConfig::validate() const {
    require(!assets.empty(), "assets", "at least one asset required");
    for (std::size_t i = 0; i < assets.size(); ++i) {
        require(assets[i].id == i, "assets", "ids must be 0..n-1 in order");
        assets[i].validate();
    }
    require(correlation.size() == assets.size(), "correlation", "size must equal asset count");
    demand.validate();
    mint_policy.validate();
    controller.validate();
    PegBand::make(band.epsilon);
    ReferencePricePolicy::make(ref_policy.p0, ref_policy.growth_rate);
    GovernanceDistribution::make(governance.weights);
    require(horizon >= 1, "horizon", "must be >= 1");
    require(burn_in >= 0 && burn_in < horizon, "burn_in", "must lie in [0, horizon)");
    require(initial_state.alpha.price > 0.0, "initial_state.alpha.price", "must be > 0");
    require(initial_state.omega.price > 0.0, "initial_state.omega.price", "must be > 0");
    require(initial_state.alpha.supply >= 0.0, "initial_state.alpha.supply", "must be >= 0");
    require(initial_state.omega.supply >= 0.0, "initial_state.omega.supply", "must be >= 0");
    require(initial_state.collateral_values.size() == assets.size(),
            "initial_state.collateral", "one value per asset");
    for (double v : initial_state.collateral_values)
        require(v >= 0.0 && std::isfinite(v), "initial_state.collateral", "values must be >= 0");
    for (const auto& p : initial_state.vaults)
        VaultPosition::make(p.kind, p.principal, p.rate, p.maturity);
    if (stress) stress->validate(horizon);
    failure.validate();
    alpha_market.validate("markets.alpha");
    omega_market.validate("markets.omega");
    treasury.validate(assets.size());
    vault_model.validate();
    liquidation.validate();
}

ProtocolState initial_protocol_state(const ScenarioConfig& config) {
    ProtocolState s;
    s.time_step = 0;
    s.alpha = {config.initial_state.alpha.price, config.initial_state.alpha.supply, 0.0};
    s.omega = {config.initial_state.omega.price, config.initial_state.omega.supply, 0.0};
    for (std::size_t i = 0; i < config.assets.size(); ++i)
        s.collateral.push_back({i, config.assets[i].kind, 1.0, config.initial_state.collateral_values[i]});
    s.refresh_totals();
    s.fee_rate = config.mint_policy.redeem_fee;
    s.reward_rate = config.controller.reward_neutral;
    s.var_rate = config.controller.rate_neutral;
    s.vault_book = VaultBook::make(config.initial_state.vaults);
    s.governance = config.governance;
    return s;
}

StepShocks StepShocks::zero(std::size_t assets) {
    StepShocks s;
    s.asset_z.assign(assets, 0.0);
    return s;
}

}  // namespace janus
