#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "janus/core_state.hpp"
#include "janus/protocol.hpp"
#include "janus/scenario.hpp"

namespace janus::test {

inline bool rel_close(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

// Two holders (crypto, rwa), unit prices, no vaults.
inline ProtocolState simple_state(double alpha_supply, double omega_supply, double crypto,
                                  double rwa) {
    ProtocolState s;
    s.alpha = {1.0, alpha_supply, 0.0};
    s.omega = {1.0, omega_supply, 0.0};
    s.collateral = {{0, AssetKind::Crypto, 1.0, crypto}, {1, AssetKind::Rwa, 1.0, rwa}};
    s.refresh_totals();
    s.governance = GovernanceDistribution::uniform(1);
    return s;
}

// A small, fully specified scenario for engine tests.
inline ScenarioConfig small_config() {
    ScenarioConfig c;
    c.assets = {{0, AssetKind::Crypto, 0.0, 0.02, 0.0}, {1, AssetKind::Rwa, 0.0, 0.0005, 0.0001}};
    c.correlation = CorrelationMatrix::identity(2);
    c.demand.base_inflow = 1000.0;
    c.demand.churn = 0.1;
    c.demand.noise_vol = 50.0;
    c.mint_policy = MintPolicy::make(1.2, 0.0, 0.0, 0.5);
    c.controller.fee_gain = 0.5;
    c.controller.reward_gain = 0.02;
    c.controller.rate_gain = 0.2;
    c.controller.relaxation = 0.1;
    c.band = PegBand::make(0.02);
    c.ref_policy = ReferencePricePolicy::make(1.0, 0.0001);
    c.governance = GovernanceDistribution::uniform(4);
    c.horizon = 60;
    c.burn_in = 10;
    c.initial_state.alpha = {1.0, 4000.0};
    c.initial_state.omega = {1.0, 4000.0};
    c.initial_state.collateral_values = {4000.0, 6000.0};
    c.alpha_market = {20000.0, 0.3, 0.02, 0.0, 0.001, 0.05, 0.5};
    c.omega_market = {20000.0, 0.3, 0.02, 10.0, 0.001, 0.05, 0.5};
    c.treasury = {0.5, 1.0, 0.1, 0.1, {0.4, 0.6}};
    c.seed = 7;
    c.validate();
    return c;
}

// Zero volatility, demand, yield and treasury activity; prices at the reference.
inline ScenarioConfig quiescent_config() {
    ScenarioConfig c = small_config();
    for (auto& a : c.assets) a.drift = a.vol = a.yield = 0.0;
    c.demand = {};
    c.ref_policy = ReferencePricePolicy::make(1.0, 0.0);
    c.alpha_market.noise_vol = c.omega_market.noise_vol = 0.0;
    c.alpha_market.crypto_beta = c.omega_market.crypto_beta = 0.0;
    c.omega_market.yield_anchor = 0.0;
    c.treasury.release_rate = c.treasury.rebalance_rate = 0.0;
    c.validate();
    return c;
}

}  // namespace janus::test
