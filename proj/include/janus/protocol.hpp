#pragma once

#include <optional>
#include <span>
#include <vector>

#include "janus/core_state.hpp"
#include "janus/market.hpp"

namespace janus {

struct MintPolicy {
    double min_collateral_ratio = 1.5;
    double mint_fee = 0.0;
    double redeem_fee = 0.0;
    double alpha_omega_split = 0.5;

    static MintPolicy make(double min_collateral_ratio, double mint_fee, double redeem_fee,
                           double alpha_omega_split);
    void validate() const;
};

struct MintResult {
    ProtocolState state;
    double alpha_minted = 0.0;
    double omega_minted = 0.0;
};

struct RedeemResult {
    ProtocolState state;
    double collateral_out = 0.0;
};

struct YieldResult {
    ProtocolState state;
    double omega_reward = 0.0;
};

struct VaultAccrualResult {
    VaultBook book;
    /// Principal + accrued of every position that matured this step.
    std::vector<double> redemptions;
};

struct LiquidationResult {
    ProtocolState state;
    double liquidated_value = 0.0;  // collateral released to burned holders
    double destroyed = 0.0;         // penalty share of the released collateral
    bool exhausted = false;         // every token burned
};

MintResult mint(const ProtocolState& state, const MintPolicy& policy, double collateral_value);

RedeemResult redeem(const ProtocolState& state, const MintPolicy& policy, double alpha,
                    double omega);

/// RWA holdings earn value * r. `treasury_split` of it is kept as backing,
/// the remainder is paid to Omega holders and leaves the balance sheet.
YieldResult accrue_rwa_yield(const ProtocolState& state, std::span<const AssetSpec> specs,
                             double treasury_split);

VaultAccrualResult accrue_vault_interest(const VaultBook& book, double variable_rate,
                                         std::int64_t t);

LiquidationResult liquidate(const ProtocolState& state, const MintPolicy& policy, double p_ref,
                            double penalty, bool omega_senior = false);

/// C_total / (S_sc * P_ref) with S_sc counting both tokens. nullopt when the
/// supply is zero (infinitely collateralized).
std::optional<double> collateral_ratio(const ProtocolState& state, double p_ref);

/// Add `amount` of collateral spread by `weights` (current weights when empty).
void add_collateral(ProtocolState& state, double amount, std::span<const double> weights = {});
/// Remove up to `amount` pro rata; returns what was actually removed.
double remove_collateral(ProtocolState& state, double amount);

}  // namespace janus
