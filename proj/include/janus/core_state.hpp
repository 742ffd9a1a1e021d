#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace janus {

/// Governance fractions held by each participant. Fractions lie in [0, 1] and
/// sum to one; `make` enforces both.
struct GovernanceDistribution {
    std::vector<double> weights;

    static GovernanceDistribution make(std::vector<double> weights);
    static GovernanceDistribution uniform(std::size_t holders);
    bool operator==(const GovernanceDistribution&) const = default;
};

/// Deterministic geometric reference path p0 * (1 + g)^t, one step per day.
struct ReferencePricePolicy {
    double p0 = 1.0;
    double growth_rate = 0.0;

    static ReferencePricePolicy make(double p0, double growth_rate);
    /// Per-step rate equivalent to an annual rate compounded over 365 steps.
    static double daily_from_annual(double annual_rate);
};

/// Soft-peg half width shared by Alpha and Omega.
struct PegBand {
    double epsilon = 0.02;

    static PegBand make(double epsilon);
};

struct TokenState {
    double price = 1.0;
    double supply = 0.0;
    /// Fractional price change over the previous step.
    double trend = 0.0;

    bool operator==(const TokenState&) const = default;
};

enum class AssetKind { Crypto, Rwa };

/// One collateral asset position. `value` is held in quote currency and
/// `asset_price` is the current market price of one asset unit.
struct CollateralHolding {
    std::size_t asset_id = 0;
    AssetKind kind = AssetKind::Crypto;
    double asset_price = 1.0;
    double value = 0.0;

    double units() const { return asset_price > 0.0 ? value / asset_price : 0.0; }
    bool operator==(const CollateralHolding&) const = default;
};

enum class VaultKind { Genesis, BorrowLend, FixedRate, VariableRate, FixedHorizon, Infinite };

std::string to_string(VaultKind kind);
std::optional<VaultKind> parse_vault_kind(std::string_view name);

struct VaultPosition {
    VaultKind kind = VaultKind::Genesis;
    double principal = 0.0;
    double rate = 0.0;
    std::optional<std::int64_t> maturity;
    double accrued = 0.0;

    static VaultPosition make(VaultKind kind, double principal, double rate,
                              std::optional<std::int64_t> maturity = std::nullopt);
    bool operator==(const VaultPosition&) const = default;
};

struct VaultBook {
    std::vector<VaultPosition> positions;
    double total_locked = 0.0;

    static VaultBook make(std::vector<VaultPosition> positions);
    void refresh_total();
    bool operator==(const VaultBook&) const = default;
};

struct ProtocolState {
    std::int64_t time_step = 0;
    TokenState alpha;
    TokenState omega;
    std::vector<CollateralHolding> collateral;
    double c_total = 0.0;
    double rwa_value = 0.0;
    double crypto_value = 0.0;
    /// Redemption fee currently charged; the controller moves it.
    double fee_rate = 0.0;
    /// Per-step token emission paid to holders.
    double reward_rate = 0.0;
    /// Rate paid by VariableRate and BorrowLend vaults.
    double var_rate = 0.0;
    /// Matured fixed-horizon redemptions, paid out of collateral next step.
    double pending_vault_payout = 0.0;
    /// Omega reward distributed from RWA yield during the last step.
    double omega_reward = 0.0;
    VaultBook vault_book;
    GovernanceDistribution governance;

    double token_supply() const { return alpha.supply + omega.supply; }
    /// Recompute c_total, crypto_value and rwa_value from the holdings.
    void refresh_totals();
    /// Portfolio weights theta_i (zeros when the portfolio is empty).
    std::vector<double> collateral_weights() const;

    bool operator==(const ProtocolState&) const = default;
};

double reference_price(const ReferencePricePolicy& policy, std::int64_t t);

struct Band {
    double lo;
    double hi;
};
Band band_bounds(double p_ref, const PegBand& band);

// State vector layout, frozen. With k collateral holdings:
//   [0] alpha.price  [1] alpha.supply  [2] alpha.trend
//   [3] omega.price  [4] omega.supply  [5] omega.trend
//   [6 .. 6+k)       collateral[i].value
//   [6+k] fee_rate  [7+k] reward_rate  [8+k] var_rate  [9+k] vault_book.total_locked
// Time, asset prices, vault accruals and governance come from the template.
namespace layout {
inline constexpr std::size_t kAlphaPrice = 0;
inline constexpr std::size_t kAlphaSupply = 1;
inline constexpr std::size_t kAlphaTrend = 2;
inline constexpr std::size_t kOmegaPrice = 3;
inline constexpr std::size_t kOmegaSupply = 4;
inline constexpr std::size_t kOmegaTrend = 5;
inline constexpr std::size_t kCollateralBegin = 6;
inline constexpr std::size_t kFixedEntries = 10;

constexpr std::size_t dimension(std::size_t holdings) { return kFixedEntries + holdings; }
constexpr std::size_t fee_index(std::size_t holdings) { return kCollateralBegin + holdings; }
constexpr std::size_t reward_index(std::size_t holdings) { return kCollateralBegin + holdings + 1; }
constexpr std::size_t var_rate_index(std::size_t holdings) { return kCollateralBegin + holdings + 2; }
constexpr std::size_t locked_index(std::size_t holdings) { return kCollateralBegin + holdings + 3; }

std::vector<std::string> names(std::size_t holdings);
}  // namespace layout

std::vector<double> to_vector(const ProtocolState& state);

struct FromVectorResult {
    ProtocolState state;
    bool clamped = false;
};

/// Overwrite the numeric sub-state of `templ` from `v`. Negative prices,
/// supplies, values and rates are clamped to zero and reported.
FromVectorResult from_vector(std::span<const double> v, const ProtocolState& templ);

}  // namespace janus
