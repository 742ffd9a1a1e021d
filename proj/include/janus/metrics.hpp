#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "janus/core_state.hpp"

namespace janus {

struct SimTrace;
struct EnsembleSummary;
struct ScenarioConfig;
struct FailureDef;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct TrilemmaPoint {
    double d = 0.0;
    double e = 0.0;
    double s = 0.0;
    Interval s_ci;
    std::string provenance;
};

enum class PonziRisk { VeryLow = 0, Low = 1, Medium = 2, High = 3, VeryHigh = 4 };
std::string to_string(PonziRisk r);

struct VerdictThresholds {
    double low = 0.3;
    double high = 0.6;
};

struct PonziReport {
    double anchor_margin = 0.0;
    std::optional<double> inflow_dependence;
    PonziRisk verdict = PonziRisk::VeryLow;
};

/// 1 - sum(w_i^2).
double decentralization(const GovernanceDistribution& gov);

/// S_sc * P_ref / C_total; nullopt when C_total is zero.
std::optional<double> capital_efficiency(double s_sc, double p_ref, double c_total);

/// M - (V1 + E[V2]); non-positive means anchored.
double ponzi_anchor_check(double m, double v1, double ev2);

/// R^2 of the per-step mean token price change regressed on net inflow.
/// nullopt for degenerate (zero-variance) traces. Throws for traces shorter
/// than 30 steps.
std::optional<double> inflow_dependence(const SimTrace& trace);

/// A missing dependence (flat price) is treated as zero.
PonziRisk ponzi_verdict(double anchor_margin, std::optional<double> inflow_dependence,
                        const VerdictThresholds& thresholds = {});

/// 95% Wilson score interval for k successes out of n.
Interval wilson_interval(std::size_t successes, std::size_t n, double z = 1.959963984540054);

struct FailureEstimate {
    double p_hat = 0.0;
    Interval ci;
    double safety() const { return 1.0 - p_hat; }
};

FailureEstimate failure_probability(const ScenarioConfig& config, const FailureDef& failure,
                                    std::size_t n_paths, std::uint64_t base_seed,
                                    std::size_t workers = 1);

TrilemmaPoint trilemma_point(const GovernanceDistribution& gov, const EnsembleSummary& ensemble,
                             std::string provenance = {});

}  // namespace janus
