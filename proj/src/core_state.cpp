#include "janus/core_state.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "janus/error.hpp"

namespace janus {

GovernanceDistribution GovernanceDistribution::make(std::vector<double> weights) {
    if (weights.empty()) throw ValidationError("governance.weights", "at least one holder required");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0 && w <= 1.0))
            throw ValidationError("governance.weights", "each weight must lie in [0, 1]");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ValidationError("governance.weights", "weights must sum to 1");
    return GovernanceDistribution{std::move(weights)};
}

GovernanceDistribution GovernanceDistribution::uniform(std::size_t holders) {
    if (holders == 0) throw ValidationError("governance.weights", "at least one holder required");
    return make(std::vector<double>(holders, 1.0 / static_cast<double>(holders)));
}

ReferencePricePolicy ReferencePricePolicy::make(double p0, double growth_rate) {
    if (!(p0 > 0.0) || !std::isfinite(p0)) throw ValidationError("reference.p0", "must be > 0");
    if (!(growth_rate >= 0.0) || !std::isfinite(growth_rate))
        throw ValidationError("reference.growth_rate", "must be >= 0");
    return {p0, growth_rate};
}

double ReferencePricePolicy::daily_from_annual(double annual_rate) {
    return std::pow(1.0 + annual_rate, 1.0 / 365.0) - 1.0;
}

PegBand PegBand::make(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("band.epsilon", "must lie in (0, 1)");
    return {epsilon};
}

std::string to_string(VaultKind kind) {
    switch (kind) {
        case VaultKind::Genesis: return "Genesis";
        case VaultKind::BorrowLend: return "BorrowLend";
        case VaultKind::FixedRate: return "FixedRate";
        case VaultKind::VariableRate: return "VariableRate";
        case VaultKind::FixedHorizon: return "FixedHorizon";
        case VaultKind::Infinite: return "Infinite";
    }
    return "Unknown";
}

std::optional<VaultKind> parse_vault_kind(std::string_view name) {
    for (auto k : {VaultKind::Genesis, VaultKind::BorrowLend, VaultKind::FixedRate,
                   VaultKind::VariableRate, VaultKind::FixedHorizon, VaultKind::Infinite})
        if (to_string(k) == name) return k;
    return std::nullopt;
}

VaultPosition VaultPosition::make(VaultKind kind, double principal, double rate,
                                  std::optional<std::int64_t> maturity) {
    if (!(principal >= 0.0)) throw ValidationError("vaults.principal", "must be >= 0");
    if (!(rate >= 0.0)) throw ValidationError("vaults.rate", "must be >= 0");
    if ((kind == VaultKind::FixedHorizon) != maturity.has_value())
        throw ValidationError("vaults.maturity", "required for FixedHorizon and only for it");
    return VaultPosition{kind, principal, rate, maturity, 0.0};
}

VaultBook VaultBook::make(std::vector<VaultPosition> positions) {
    VaultBook book{std::move(positions), 0.0};
    book.refresh_total();
    return book;
}

void VaultBook::refresh_total() {
    total_locked = 0.0;
    for (const auto& p : positions) total_locked += p.principal;
}

void ProtocolState::refresh_totals() {
    crypto_value = 0.0;
    rwa_value = 0.0;
    for (const auto& h : collateral) {
        if (h.kind == AssetKind::Rwa)
            rwa_value += h.value;
        else
            crypto_value += h.value;
    }
    c_total = crypto_value + rwa_value;
}

std::vector<double> ProtocolState::collateral_weights() const {
    std::vector<double> w(collateral.size(), 0.0);
    double total = 0.0;
    for (const auto& h : collateral) total += h.value;
    if (total <= 0.0) return w;
    for (std::size_t i = 0; i < collateral.size(); ++i) w[i] = collateral[i].value / total;
    return w;
}

double reference_price(const ReferencePricePolicy& policy, std::int64_t t) {
    if (policy.growth_rate == 0.0 || t == 0) return policy.p0;
    return policy.p0 * std::pow(1.0 + policy.growth_rate, static_cast<double>(t));
}

Band band_bounds(double p_ref, const PegBand& band) {
    // half = hi - p_ref is exact for epsilon < 1, and so is p_ref - half, which
    // makes the band exactly symmetric in floating point.
    const double hi = p_ref + p_ref * band.epsilon;
    const double half = hi - p_ref;
    return {p_ref - half, hi};
}

namespace layout {
std::vector<std::string> names(std::size_t holdings) {
    std::vector<std::string> n{"alpha.price", "alpha.supply", "alpha.trend",
                               "omega.price", "omega.supply", "omega.trend"};
    for (std::size_t i = 0; i < holdings; ++i) n.push_back("collateral[" + std::to_string(i) + "].value");
    n.insert(n.end(), {"fee_rate", "reward_rate", "var_rate", "vault_book.total_locked"});
    return n;
}
}  // namespace layout

std::vector<double> to_vector(const ProtocolState& s) {
    const std::size_t k = s.collateral.size();
    std::vector<double> v;
    v.reserve(layout::dimension(k));
    v.insert(v.end(), {s.alpha.price, s.alpha.supply, s.alpha.trend, s.omega.price, s.omega.supply,
                       s.omega.trend});
    for (const auto& h : s.collateral) v.push_back(h.value);
    v.insert(v.end(), {s.fee_rate, s.reward_rate, s.var_rate, s.vault_book.total_locked});
    return v;
}

namespace {
double non_negative(double x, bool& clamped) {
    if (x < 0.0) {
        clamped = true;
        return 0.0;
    }
    return x;
}
}  // namespace

FromVectorResult from_vector(std::span<const double> v, const ProtocolState& templ) {
    const std::size_t k = templ.collateral.size();
    if (v.size() != layout::dimension(k)) throw DimensionError(layout::dimension(k), v.size());

    FromVectorResult out{templ, false};
    ProtocolState& s = out.state;
    bool& c = out.clamped;
    s.alpha.price = non_negative(v[layout::kAlphaPrice], c);
    s.alpha.supply = non_negative(v[layout::kAlphaSupply], c);
    s.alpha.trend = v[layout::kAlphaTrend];
    s.omega.price = non_negative(v[layout::kOmegaPrice], c);
    s.omega.supply = non_negative(v[layout::kOmegaSupply], c);
    s.omega.trend = v[layout::kOmegaTrend];
    for (std::size_t i = 0; i < k; ++i)
        s.collateral[i].value = non_negative(v[layout::kCollateralBegin + i], c);
    s.refresh_totals();
    s.fee_rate = non_negative(v[layout::fee_index(k)], c);
    s.reward_rate = non_negative(v[layout::reward_index(k)], c);
    s.var_rate = non_negative(v[layout::var_rate_index(k)], c);

    const double locked = non_negative(v[layout::locked_index(k)], c);
    VaultBook& book = s.vault_book;
    if (locked != book.total_locked) {
        if (book.total_locked > 0.0) {
            const double scale = locked / book.total_locked;
            for (auto& p : book.positions) p.principal *= scale;
        } else if (locked > 0.0) {
            book.positions.push_back(VaultPosition::make(VaultKind::VariableRate, locked, 0.0));
        }
        book.total_locked = locked;
    }
    return out;
}

}  // namespace janus
