#include "janus/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "janus/error.hpp"

namespace janus {

MintPolicy MintPolicy::make(double min_collateral_ratio, double mint_fee, double redeem_fee,
                            double alpha_omega_split) {
    MintPolicy p{min_collateral_ratio, mint_fee, redeem_fee, alpha_omega_split};
    p.validate();
    return p;
}

void MintPolicy::validate() const {
    if (!(min_collateral_ratio >= 1.0) || !std::isfinite(min_collateral_ratio))
        throw ValidationError("mint_policy.min_collateral_ratio", "must be >= 1");
    if (!(mint_fee >= 0.0 && mint_fee <= 0.2))
        throw ValidationError("mint_policy.mint_fee", "must lie in [0, 0.2]");
    if (!(redeem_fee >= 0.0 && redeem_fee <= 0.2))
        throw ValidationError("mint_policy.redeem_fee", "must lie in [0, 0.2]");
    if (!(alpha_omega_split >= 0.0 && alpha_omega_split <= 1.0))
        throw ValidationError("mint_policy.alpha_omega_split", "must lie in [0, 1]");
}

void add_collateral(ProtocolState& state, double amount, std::span<const double> weights) {
    if (amount == 0.0) return;
    if (state.collateral.empty()) throw ValidationError("collateral", "state has no collateral holdings");
    std::vector<double> w = weights.empty() ? state.collateral_weights()
                                            : std::vector<double>(weights.begin(), weights.end());
    if (w.size() != state.collateral.size())
        throw ValidationError("collateral", "weight count does not match holdings");
    double sum = 0.0;
    for (double x : w) sum += x;
    if (sum <= 0.0) {
        std::fill(w.begin(), w.end(), 1.0);
        sum = static_cast<double>(w.size());
    }
    for (std::size_t i = 0; i < w.size(); ++i) state.collateral[i].value += amount * w[i] / sum;
    state.refresh_totals();
}

double remove_collateral(ProtocolState& state, double amount) {
    if (amount <= 0.0 || state.c_total <= 0.0) return 0.0;
    const double taken = std::min(amount, state.c_total);
    const double keep = 1.0 - taken / state.c_total;
    for (auto& h : state.collateral) h.value = taken == state.c_total ? 0.0 : h.value * keep;
    state.refresh_totals();
    return taken;
}

MintResult mint(const ProtocolState& state, const MintPolicy& policy, double collateral_value) {
    if (!(collateral_value > 0.0) || !std::isfinite(collateral_value))
        throw ValidationError("collateral_value", "mint requires positive collateral");
    const double notional = collateral_value / policy.min_collateral_ratio * (1.0 - policy.mint_fee);
    const double alpha_notional = notional * policy.alpha_omega_split;
    const double omega_notional = notional - alpha_notional;

    MintResult out{state, 0.0, 0.0};
    if (alpha_notional > 0.0) {
        if (!(state.alpha.price > 0.0)) throw NumericalError("mint: alpha price must be > 0");
        out.alpha_minted = alpha_notional / state.alpha.price;
    }
    if (omega_notional > 0.0) {
        if (!(state.omega.price > 0.0)) throw NumericalError("mint: omega price must be > 0");
        out.omega_minted = omega_notional / state.omega.price;
    }
    out.state.alpha.supply += out.alpha_minted;
    out.state.omega.supply += out.omega_minted;
    add_collateral(out.state, collateral_value);
    return out;
}

RedeemResult redeem(const ProtocolState& state, const MintPolicy& policy, double alpha,
                    double omega) {
    if (!(alpha >= 0.0) || !(omega >= 0.0))
        throw ValidationError("redeem", "amounts must be non-negative");
    if (alpha > state.alpha.supply) throw ValidationError("redeem.alpha", "exceeds alpha supply");
    if (omega > state.omega.supply) throw ValidationError("redeem.omega", "exceeds omega supply");
    RedeemResult out{state, 0.0};
    if (alpha == 0.0 && omega == 0.0) return out;
    const double gross = alpha * state.alpha.price + omega * state.omega.price;
    out.collateral_out = remove_collateral(out.state, gross * (1.0 - policy.redeem_fee));
    out.state.alpha.supply -= alpha;
    out.state.omega.supply -= omega;
    return out;
}

YieldResult accrue_rwa_yield(const ProtocolState& state, std::span<const AssetSpec> specs,
                             double treasury_split) {
    YieldResult out{state, 0.0};
    double distributed = 0.0;
    bool changed = false;
    for (auto& h : out.state.collateral) {
        if (h.kind != AssetKind::Rwa || h.asset_id >= specs.size()) continue;
        const double y = h.value * specs[h.asset_id].yield;
        if (y == 0.0) continue;
        h.value += treasury_split * y;
        distributed += (1.0 - treasury_split) * y;
        changed = true;
    }
    if (changed) out.state.refresh_totals();
    out.omega_reward = distributed;
    return out;
}

VaultAccrualResult accrue_vault_interest(const VaultBook& book, double variable_rate,
                                         std::int64_t t) {
    VaultAccrualResult out;
    out.book.positions.reserve(book.positions.size());
    for (VaultPosition p : book.positions) {
        const bool floating = p.kind == VaultKind::VariableRate || p.kind == VaultKind::BorrowLend;
        p.accrued += p.principal * (floating ? variable_rate : p.rate);
        if (p.kind == VaultKind::FixedHorizon && p.maturity && t >= *p.maturity) {
            out.redemptions.push_back(p.principal + p.accrued);
            continue;
        }
        out.book.positions.push_back(p);
    }
    if (out.book.positions.size() == book.positions.size() && out.redemptions.empty())
        out.book.total_locked = book.total_locked;
    else
        out.book.refresh_total();
    return out;
}

std::optional<double> collateral_ratio(const ProtocolState& state, double p_ref) {
    const double s = state.token_supply();
    if (s <= 0.0) return std::nullopt;
    return state.c_total / (s * p_ref);
}

LiquidationResult liquidate(const ProtocolState& state, const MintPolicy& policy, double p_ref,
                            double penalty, bool omega_senior) {
    LiquidationResult out{state, 0.0, 0.0, false};
    const auto ratio = collateral_ratio(state, p_ref);
    const double m = policy.min_collateral_ratio;
    if (!ratio || *ratio >= m * (1.0 - 1e-12)) return out;

    ProtocolState& s = out.state;
    const double notional = s.token_supply() * p_ref;
    // Burning b of notional and releasing b of collateral: (c - b) / (S - b) = m.
    double burn = m > 1.0 ? (m * notional - s.c_total) / (m - 1.0)
                          : std::numeric_limits<double>::infinity();
    if (burn >= notional) {
        out.liquidated_value = remove_collateral(s, std::min(s.c_total, notional));
        s.alpha.supply = 0.0;
        s.omega.supply = 0.0;
        out.exhausted = true;
    } else {
        double burn_tokens = burn / p_ref;
        const double total = s.token_supply();
        if (omega_senior) {
            const double from_alpha = std::min(burn_tokens, s.alpha.supply);
            s.alpha.supply -= from_alpha;
            s.omega.supply = std::max(0.0, s.omega.supply - (burn_tokens - from_alpha));
        } else {
            const double keep = 1.0 - burn_tokens / total;
            s.alpha.supply *= keep;
            s.omega.supply *= keep;
        }
        out.liquidated_value = remove_collateral(s, burn);
    }
    out.destroyed = penalty * out.liquidated_value;
    return out;
}

}  // namespace janus
