#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "janus/core_state.hpp"
#include "janus/matrix.hpp"
#include "janus/scenario.hpp"

namespace janus {

struct ControlAction {
    double fee_delta = 0.0;
    double reward_delta = 0.0;
    double rate_delta = 0.0;

    bool is_zero() const { return fee_delta == 0.0 && reward_delta == 0.0 && rate_delta == 0.0; }
    bool operator==(const ControlAction&) const = default;
};

struct ControlSettings {
    double fee_rate = 0.0;
    double reward_rate = 0.0;
    double var_rate = 0.0;
};

/// Deadbanded proportional increments on the excess deviation beyond the
/// band. Above the band rewards rise while the redemption fee and vault rate
/// fall (supply expands); below it the mirror image. Deltas are the ones
/// actually applied after saturating at the actuation bounds.
ControlAction control_action(double price, double p_ref, const PegBand& band,
                             const ControllerParams& params, const ControlSettings& current);

/// One deterministic transition of the full protocol under frozen shocks.
ProtocolState step_map(const ProtocolState& state, const ScenarioConfig& config,
                       const StepShocks& shocks);

using VectorMap = std::function<std::vector<double>(std::span<const double>)>;

enum class Stability { Stable, Marginal, Unstable };
std::string to_string(Stability s);

struct EquilibriumReport {
    std::vector<double> x_star;
    double residual = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    Matrix jacobian;
    double spectral_radius = 0.0;
    Stability stability = Stability::Marginal;
};

struct FixedPointOptions {
    double damping = 0.5;
    double tol = 1e-10;
    std::size_t max_iter = 10000;
};

/// Damped iteration x <- (1 - a) x + a F(x) until
/// max_i |F(x)_i - x_i| / max(|x_i|, 1) <= tol.
/// Only x_star, residual, iterations and converged are filled in.
EquilibriumReport find_fixed_point(const VectorMap& f, std::span<const double> x0,
                                   const FixedPointOptions& options = {});

/// Central differences with step h * max(|x_i|, 1) per coordinate.
Matrix jacobian_fd(const VectorMap& f, std::span<const double> x_star, double h = 1e-6);

double spectral_radius(const Matrix& j);

Stability classify_stability(double rho, double margin = 0.05);

/// State map x -> to_vector(step_map(from_vector(x, template))) at frozen
/// time with zero shocks.
VectorMap skeleton_map(const ScenarioConfig& config, const ProtocolState& templ);

struct EquilibriumOptions {
    FixedPointOptions solver;
    double fd_step = 1e-6;
    double margin = 0.05;
};

/// Solve, linearize and classify the deterministic skeleton. When the solver
/// does not converge the Jacobian is left empty.
EquilibriumReport analyze_equilibrium(const ScenarioConfig& config,
                                      const EquilibriumOptions& options = {});

}  // namespace janus
