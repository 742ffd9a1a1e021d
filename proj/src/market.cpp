#include "janus/market.hpp"

#include <cmath>
#include <string>

#include "janus/error.hpp"

namespace janus {

void AssetSpec::validate() const {
    const std::string f = "assets[" + std::to_string(id) + "]";
    if (!std::isfinite(drift)) throw ValidationError(f + ".drift", "must be finite");
    if (!(vol >= 0.0) || !std::isfinite(vol)) throw ValidationError(f + ".vol", "must be >= 0");
    if (!(yield >= 0.0) || !std::isfinite(yield)) throw ValidationError(f + ".yield", "must be >= 0");
}

void DemandParams::validate() const {
    if (!(noise_vol >= 0.0)) throw ValidationError("demand.noise_vol", "must be >= 0");
    if (!(churn >= 0.0 && churn <= 1.0)) throw ValidationError("demand.churn", "must lie in [0, 1]");
    if (!(redeem_fee_elasticity >= 0.0))
        throw ValidationError("demand.redeem_fee_elasticity", "must be >= 0");
    for (double v : {base_inflow, sentiment_gain, deviation_gain})
        if (!std::isfinite(v)) throw ValidationError("demand", "gains must be finite");
}

Matrix cholesky_factor(const Matrix& corr) {
    if (!corr.square()) throw ValidationError("correlation", "matrix must be square");
    const std::size_t n = corr.rows();
    Matrix l(n, n);
    constexpr double kPivotTol = 1e-12;
    for (std::size_t j = 0; j < n; ++j) {
        double pivot = corr(j, j);
        for (std::size_t k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
        if (pivot < -kPivotTol)
            throw NumericalError("correlation: matrix is not positive semidefinite (pivot " +
                                 std::to_string(j) + " = " + std::to_string(pivot) + ")");
        const double d = pivot > kPivotTol ? std::sqrt(pivot) : 0.0;
        l(j, j) = d;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = corr(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (d > 0.0) {
                l(i, j) = s / d;
            } else if (std::abs(s) > 1e-9) {
                throw NumericalError("correlation: matrix is not positive semidefinite (pivot " +
                                     std::to_string(j) + " is zero with nonzero column)");
            }
        }
    }
    return l;
}

CorrelationMatrix CorrelationMatrix::make(Matrix entries) {
    if (!entries.square()) throw ValidationError("correlation", "matrix must be square");
    const std::size_t n = entries.rows();
    for (std::size_t i = 0; i < n; ++i) {
        if (entries(i, i) != 1.0) throw ValidationError("correlation", "diagonal must be 1");
        for (std::size_t j = 0; j < n; ++j) {
            const double r = entries(i, j);
            if (!std::isfinite(r) || std::abs(r) > 1.0)
                throw ValidationError("correlation", "entries must satisfy |rho| <= 1");
            if (r != entries(j, i)) throw ValidationError("correlation", "matrix must be symmetric");
        }
    }
    CorrelationMatrix c;
    try {
        c.factor_ = cholesky_factor(entries);
    } catch (const NumericalError& e) {
        throw ValidationError("correlation", e.what());
    }
    c.entries_ = std::move(entries);
    return c;
}

CorrelationMatrix CorrelationMatrix::identity(std::size_t n) { return make(Matrix::identity(n)); }

std::vector<double> asset_log_returns(std::span<const AssetSpec> specs, const Matrix& factor,
                                      std::span<const double> z) {
    const std::size_t n = specs.size();
    std::vector<double> r(n, 0.0);
    const bool zero_shocks = z.empty();
    if (!zero_shocks && z.size() != n) throw DimensionError(n, z.size());
    if (!zero_shocks && factor.rows() != n) throw DimensionError(n, factor.rows());
    for (std::size_t i = 0; i < n; ++i) {
        double shock = 0.0;
        if (!zero_shocks)
            for (std::size_t j = 0; j <= i; ++j) shock += factor(i, j) * z[j];
        const double sigma = specs[i].vol;
        r[i] = (specs[i].drift - 0.5 * sigma * sigma) + sigma * shock;
    }
    return r;
}

std::vector<double> step_asset_prices(std::span<const double> prices,
                                      std::span<const AssetSpec> specs, const Matrix& factor,
                                      std::span<const double> z) {
    if (prices.size() != specs.size()) throw DimensionError(specs.size(), prices.size());
    const auto r = asset_log_returns(specs, factor, z);
    std::vector<double> out(prices.size());
    for (std::size_t i = 0; i < prices.size(); ++i) out[i] = prices[i] * std::exp(r[i]);
    return out;
}

double net_demand(double price, double p_ref, double trend, const DemandParams& p, double noise) {
    const double deviation = (price - p_ref) / p_ref;
    return p.base_inflow + p.sentiment_gain * trend * p.base_inflow +
           p.deviation_gain * deviation * p.base_inflow + p.noise_vol * noise;
}

double portfolio_variance(std::span<const double> weights, std::span<const double> variances,
                          const CorrelationMatrix& corr) {
    const std::size_t n = weights.size();
    if (variances.size() != n || corr.size() != n)
        throw ValidationError("portfolio_variance", "weights, variances and correlation size differ");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (variances[i] < 0.0) throw ValidationError("portfolio_variance", "variances must be >= 0");
        total += weights[i] * weights[i] * variances[i];
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            total += 2.0 * weights[i] * weights[j] * corr(i, j) *
                     std::sqrt(variances[i] * variances[j]);
    return total < 0.0 ? 0.0 : total;
}

}  // namespace janus
