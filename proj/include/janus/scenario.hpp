#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "janus/core_state.hpp"
#include "janus/market.hpp"
#include "janus/protocol.hpp"

namespace janus {

struct Bounds {
    double min = 0.0;
    double max = 0.0;
    double clamp(double v) const { return v < min ? min : (v > max ? max : v); }
};

struct ControllerParams {
    double fee_gain = 0.0;
    double reward_gain = 0.0;
    double rate_gain = 0.0;
    Bounds fee_bounds{0.0, 0.2};
    Bounds reward_bounds{0.0, 0.05};
    Bounds rate_bounds{0.0, 0.01};
    /// Resting values the parameters relax back to.
    double fee_neutral = 0.0;
    double reward_neutral = 0.0;
    double rate_neutral = 0.0;
    /// Fraction of the gap to neutral closed each step, applied before the action.
    double relaxation = 0.0;

    void validate() const;
    bool active() const { return fee_gain > 0.0 || reward_gain > 0.0 || rate_gain > 0.0; }
    ControllerParams disabled() const;
};

/// Secondary-market model for one token.
struct TokenMarket {
    double depth = 1000.0;        // quote currency moving log-price by one
    double anchor_gain = 0.0;     // backing arbitrage pull per unit deviation
    double anchor_width = 0.02;   // deviation where the backing pull peaks; gone at twice this
    double yield_anchor = 0.0;    // pull per unit of distributed yield rate (Omega)
    double noise_vol = 0.0;       // idiosyncratic per-step log noise
    double crypto_beta = 0.0;     // exposure to crypto collateral return shocks
    double absorption = 0.0;      // share of issuance flow settled off-market

    void validate(const char* field) const;
};

struct TreasuryParams {
    double treasury_split = 1.0;   // RWA yield kept as backing
    double reserve_multiple = 1.0; // target ratio = min_collateral_ratio * reserve_multiple
    double release_rate = 0.0;     // share of surplus above target released per step
    double rebalance_rate = 0.0;   // speed toward target weights
    std::vector<double> target_weights;

    void validate(std::size_t assets) const;
};

struct VaultModel {
    double lock_base = 0.0;        // locked share of token value at the neutral rate
    double lock_elasticity = 0.0;  // locked share per unit of rate above neutral
    double lock_speed = 0.0;

    void validate() const;
};

struct LiquidationParams {
    bool enabled = true;
    double penalty = 0.1;
    bool omega_senior = false;

    void validate() const;
};

enum class StressKind { CryptoCrash, RwaShortfall, DemandCollapse };

struct StressOverlay {
    StressKind kind = StressKind::CryptoCrash;
    std::int64_t onset = 0;
    double magnitude = 0.0;
    std::int64_t duration = 0;

    void validate(std::int64_t horizon) const;
};

struct FailureDef {
    std::int64_t grace = 14;
    double floor = 0.5;

    void validate() const;
};

struct TokenInit {
    double price = 1.0;
    double supply = 0.0;
};

struct InitialState {
    TokenInit alpha;
    TokenInit omega;
    std::vector<double> collateral_values;  // one per asset, quote currency
    std::vector<VaultPosition> vaults;
};

struct ScenarioConfig {
    std::vector<AssetSpec> assets;
    CorrelationMatrix correlation = CorrelationMatrix::identity(0);
    DemandParams demand;
    MintPolicy mint_policy;
    ControllerParams controller;
    PegBand band;
    ReferencePricePolicy ref_policy;
    GovernanceDistribution governance = GovernanceDistribution::uniform(1);
    std::int64_t horizon = 365;
    std::int64_t burn_in = 30;
    InitialState initial_state;
    std::optional<StressOverlay> stress;
    FailureDef failure;
    std::uint64_t seed = 0;
    TokenMarket alpha_market;
    TokenMarket omega_market;
    TreasuryParams treasury;
    VaultModel vault_model;
    LiquidationParams liquidation;

    void validate() const;
    double target_collateral_ratio() const {
        return mint_policy.min_collateral_ratio * treasury.reserve_multiple;
    }
};

ProtocolState initial_protocol_state(const ScenarioConfig& config);

/// Shocks for one step. Empty asset_z means all-zero shocks.
struct StepShocks {
    std::vector<double> asset_z;
    double demand_noise = 0.0;
    double alpha_noise = 0.0;
    double omega_noise = 0.0;

    static StepShocks zero(std::size_t assets);
};

}  // namespace janus
