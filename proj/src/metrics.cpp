#include "janus/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "janus/error.hpp"
#include "janus/sim_engine.hpp"

namespace janus {

std::string to_string(PonziRisk r) {
    switch (r) {
        case PonziRisk::VeryLow: return "VeryLow";
        case PonziRisk::Low: return "Low";
        case PonziRisk::Medium: return "Medium";
        case PonziRisk::High: return "High";
        case PonziRisk::VeryHigh: return "VeryHigh";
    }
    return "Unknown";
}

double decentralization(const GovernanceDistribution& gov) {
    double hhi = 0.0;
    for (double w : gov.weights) hhi += w * w;
    return 1.0 - hhi;
}

std::optional<double> capital_efficiency(double s_sc, double p_ref, double c_total) {
    if (c_total <= 0.0) return std::nullopt;
    return s_sc * p_ref / c_total;
}

double ponzi_anchor_check(double m, double v1, double ev2) { return m - (v1 + ev2); }

std::optional<double> inflow_dependence(const SimTrace& trace) {
    const auto& r = trace.records;
    if (r.size() < 30) throw ValidationError("trace", "inflow dependence needs at least 30 steps");
    const std::size_t n = r.size() - 1;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 1; i < r.size(); ++i) {
        mx += r[i].net_inflow;
        my += 0.5 * (r[i].p_a + r[i].p_omega) - 0.5 * (r[i - 1].p_a + r[i - 1].p_omega);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 1; i < r.size(); ++i) {
        const double dx = r[i].net_inflow - mx;
        const double dy = 0.5 * (r[i].p_a + r[i].p_omega) - 0.5 * (r[i - 1].p_a + r[i - 1].p_omega) - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
    return std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
}

PonziRisk ponzi_verdict(double anchor_margin, std::optional<double> dependence,
                        const VerdictThresholds& th) {
    const double dep = dependence.value_or(0.0);
    if (anchor_margin <= 0.0) {
        if (dep < th.low) return PonziRisk::VeryLow;
        if (dep < th.high) return PonziRisk::Low;
        return PonziRisk::Medium;
    }
    return dep < th.high ? PonziRisk::High : PonziRisk::VeryHigh;
}

Interval wilson_interval(std::size_t successes, std::size_t n, double z) {
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    const double lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
    const double hi = successes == n ? 1.0 : std::min(1.0, centre + half);
    return {lo, hi};
}

FailureEstimate failure_probability(const ScenarioConfig& config, const FailureDef& failure,
                                    std::size_t n_paths, std::uint64_t base_seed,
                                    std::size_t workers) {
    ScenarioConfig c = config;
    c.failure = failure;
    c.seed = base_seed;
    const EnsembleSummary e = monte_carlo(c, n_paths, workers);
    return {e.p_hat, e.ci};
}

TrilemmaPoint trilemma_point(const GovernanceDistribution& gov, const EnsembleSummary& ensemble,
                             std::string provenance) {
    if (ensemble.n_paths == 0) throw ValidationError("ensemble", "needs at least one path");
    TrilemmaPoint p;
    p.d = decentralization(gov);
    p.e = ensemble.mean_capital_efficiency;
    p.s = 1.0 - ensemble.p_hat;
    p.s_ci = {1.0 - ensemble.ci.hi, 1.0 - ensemble.ci.lo};
    p.provenance = std::move(provenance);
    return p;
}

}  // namespace janus
