#include "janus/controller.hpp"

#include <algorithm>
#include <cmath>

#include "janus/error.hpp"
#include "janus/sim_engine.hpp"

namespace janus {

ControlAction control_action(double price, double p_ref, const PegBand& band,
                             const ControllerParams& params, const ControlSettings& current) {
    const double d = (price - p_ref) / p_ref;
    if (std::abs(d) <= band.epsilon) return {};
    // Signed excess beyond the nearest band edge.
    const double excess = d > 0.0 ? d - band.epsilon : d + band.epsilon;

    const auto saturate = [](const Bounds& b, double value, double raw) {
        return b.clamp(value + raw) - value;
    };
    ControlAction a;
    a.reward_delta = saturate(params.reward_bounds, current.reward_rate, params.reward_gain * excess);
    a.fee_delta = saturate(params.fee_bounds, current.fee_rate, -params.fee_gain * excess);
    a.rate_delta = saturate(params.rate_bounds, current.var_rate, -params.rate_gain * excess);
    return a;
}

ProtocolState step_map(const ProtocolState& state, const ScenarioConfig& config,
                       const StepShocks& shocks) {
    return transition(state, config, shocks).state;
}

std::string to_string(Stability s) {
    switch (s) {
        case Stability::Stable: return "Stable";
        case Stability::Marginal: return "Marginal";
        case Stability::Unstable: return "Unstable";
    }
    return "Unknown";
}

namespace {
bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Componentwise |a - b| / max(|b|, 1), so large balances and unit-scale
// prices share one tolerance.
double max_norm_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]) / std::max(std::abs(b[i]), 1.0));
    return m;
}

double frobenius(const Matrix& m) {
    double s = 0.0;
    for (double x : m.data()) s += x * x;
    return std::sqrt(s);
}
}  // namespace

EquilibriumReport find_fixed_point(const VectorMap& f, std::span<const double> x0,
                                   const FixedPointOptions& options) {
    if (!(options.damping > 0.0 && options.damping <= 1.0))
        throw ValidationError("damping", "must lie in (0, 1]");
    if (!(options.tol > 0.0)) throw ValidationError("tol", "must be > 0");

    EquilibriumReport report;
    std::vector<double> x(x0.begin(), x0.end());
    double residual = std::numeric_limits<double>::infinity();
    for (std::size_t iter = 0;; ++iter) {
        const std::vector<double> fx = f(x);
        if (fx.size() != x.size()) throw DimensionError(x.size(), fx.size());
        if (!all_finite(fx)) throw DivergenceError(iter, residual);
        residual = max_norm_diff(fx, x);
        if (residual <= options.tol || iter >= options.max_iter) {
            report.x_star = std::move(x);
            report.residual = residual;
            report.iterations = iter;
            report.converged = residual <= options.tol;
            return report;
        }
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] = (1.0 - options.damping) * x[i] + options.damping * fx[i];
    }
}

Matrix jacobian_fd(const VectorMap& f, std::span<const double> x_star, double h) {
    if (!(h > 0.0)) throw ValidationError("h", "must be > 0");
    const std::size_t n = x_star.size();
    Matrix j(n, n);
    std::vector<double> xp(x_star.begin(), x_star.end());
    std::vector<double> xm = xp;
    for (std::size_t i = 0; i < n; ++i) {
        const double step = h * std::max(std::abs(x_star[i]), 1.0);
        xp[i] = x_star[i] + step;
        xm[i] = x_star[i] - step;
        const auto fp = f(xp);
        const auto fm = f(xm);
        if (fp.size() != n || fm.size() != n) throw DimensionError(n, fp.size());
        for (std::size_t r = 0; r < n; ++r) {
            const double d = (fp[r] - fm[r]) / (2.0 * step);
            if (!std::isfinite(d))
                throw NumericalError("jacobian_fd: non-finite derivative along coordinate " +
                                     std::to_string(i));
            j(r, i) = d;
        }
        xp[i] = xm[i] = x_star[i];
    }
    return j;
}

// Power iteration on the matrix itself: repeated normalized squaring gives
// log ||J^(2^k)||, and ||J^n||^(1/n) tends to the spectral radius for any
// eigenvalue configuration (complex pairs and ties included).
double spectral_radius(const Matrix& j) {
    if (!j.square()) throw ValidationError("jacobian", "matrix must be square");
    if (!all_finite(j.data())) throw NumericalError("spectral_radius: non-finite entries");
    const std::size_t n = j.rows();
    if (n == 0) return 0.0;
    const double norm = frobenius(j);
    if (norm == 0.0) return 0.0;

    Matrix b = j;
    for (double& x : b.data()) x /= norm;
    double log_norm = std::log(norm);
    double estimate = norm;
    double scale = 1.0;  // 2^-k
    constexpr int kMaxSquarings = 60;
    for (int k = 1; k <= kMaxSquarings; ++k) {
        Matrix sq = multiply(b, b);
        const double nb = frobenius(sq);
        if (nb == 0.0 || !std::isfinite(nb)) {
            if (nb == 0.0) return 0.0;
            throw NumericalError("spectral_radius: power iteration overflowed");
        }
        for (double& x : sq.data()) x /= nb;
        b = std::move(sq);
        log_norm = 2.0 * log_norm + std::log(nb);
        scale *= 0.5;
        const double next = std::exp(log_norm * scale);
        if (!std::isfinite(next)) throw NumericalError("spectral_radius: non-finite estimate");
        if (k >= 20 && std::abs(next - estimate) <= 1e-15 * std::max(next, 1e-300)) return next;
        estimate = next;
    }
    return estimate;
}

Stability classify_stability(double rho, double margin) {
    if (rho < 1.0 - margin) return Stability::Stable;
    if (rho > 1.0 + margin) return Stability::Unstable;
    return Stability::Marginal;
}

VectorMap skeleton_map(const ScenarioConfig& config, const ProtocolState& templ) {
    const StepShocks zero = StepShocks::zero(config.assets.size());
    return [config, templ, zero](std::span<const double> x) {
        const ProtocolState s = from_vector(x, templ).state;
        return to_vector(step_map(s, config, zero));
    };
}

EquilibriumReport analyze_equilibrium(const ScenarioConfig& config,
                                      const EquilibriumOptions& options) {
    const ProtocolState templ = initial_protocol_state(config);
    const VectorMap f = skeleton_map(config, templ);
    EquilibriumReport report = find_fixed_point(f, to_vector(templ), options.solver);
    if (!report.converged) return report;
    report.jacobian = jacobian_fd(f, report.x_star, options.fd_step);
    report.spectral_radius = spectral_radius(report.jacobian);
    report.stability = classify_stability(report.spectral_radius, options.margin);
    return report;
}

}  // namespace janus
