#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "janus/core_state.hpp"
#include "janus/matrix.hpp"

namespace janus {

struct AssetSpec {
    std::size_t id = 0;
    AssetKind kind = AssetKind::Crypto;
    double drift = 0.0;  // per-step expected log-return
    double vol = 0.0;    // per-step log-return standard deviation
    double yield = 0.0;  // per-step external yield

    void validate() const;
};

/// Validated correlation matrix: symmetric, unit diagonal, |rho| <= 1 and
/// positive semidefinite (checked by factorizing).
class CorrelationMatrix {
public:
    static CorrelationMatrix make(Matrix entries);
    static CorrelationMatrix identity(std::size_t n);

    std::size_t size() const noexcept { return entries_.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
    const Matrix& entries() const noexcept { return entries_; }
    const Matrix& factor() const noexcept { return factor_; }

private:
    Matrix entries_;
    Matrix factor_;
};

struct DemandParams {
    double base_inflow = 0.0;
    double sentiment_gain = 0.0;
    double deviation_gain = 0.0;
    double noise_vol = 0.0;
    /// Fraction of circulating token value redeemed per step.
    double churn = 0.0;
    /// Relative drop in redemptions per unit of redemption fee above neutral.
    double redeem_fee_elasticity = 0.0;

    void validate() const;
};

/// Lower-triangular L with L * L^T = corr. Throws NumericalError naming the
/// first pivot that goes negative. Zero pivots (semidefinite) are accepted.
Matrix cholesky_factor(const Matrix& corr);

/// Geometric step p' = p * exp((mu - sigma^2/2) + sigma * (L z)_i).
std::vector<double> step_asset_prices(std::span<const double> prices,
                                      std::span<const AssetSpec> specs, const Matrix& factor,
                                      std::span<const double> z);

/// Per-asset log-returns of one step, excluding any level multiplier.
std::vector<double> asset_log_returns(std::span<const AssetSpec> specs, const Matrix& factor,
                                      std::span<const double> z);

double net_demand(double price, double p_ref, double trend, const DemandParams& params,
                  double noise);

double portfolio_variance(std::span<const double> weights, std::span<const double> variances,
                          const CorrelationMatrix& corr);

}  // namespace janus
