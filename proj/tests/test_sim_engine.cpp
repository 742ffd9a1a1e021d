#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>

#include "janus/config_io.hpp"
#include "janus/error.hpp"
#include "janus/sim_engine.hpp"
#include "support.hpp"

using namespace janus;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool same_record(const SimRecord& a, const SimRecord& b) {
    return a.t == b.t && same_bits(a.p_a, b.p_a) && same_bits(a.p_omega, b.p_omega) &&
           same_bits(a.p_ref, b.p_ref) && same_bits(a.supply_a, b.supply_a) &&
           same_bits(a.supply_omega, b.supply_omega) && same_bits(a.c_total, b.c_total) &&
           same_bits(a.v1, b.v1) && same_bits(a.v2, b.v2) &&
           same_bits(a.net_inflow, b.net_inflow) && same_bits(a.fee_rate, b.fee_rate) &&
           same_bits(a.reward_rate, b.reward_rate) && same_bits(a.var_rate, b.var_rate) &&
           a.in_band == b.in_band && a.failed == b.failed;
}

bool same_summary(const PathSummary& a, const PathSummary& b) {
    return same_bits(a.in_band_fraction, b.in_band_fraction) && a.failed == b.failed &&
           a.failure_step == b.failure_step && same_bits(a.terminal_p_a, b.terminal_p_a) &&
           same_bits(a.terminal_p_omega, b.terminal_p_omega) &&
           same_bits(a.mean_capital_efficiency, b.mean_capital_efficiency) &&
           a.inflow_dependence == b.inflow_dependence && a.steps == b.steps;
}

bool same_ensemble(const EnsembleSummary& a, const EnsembleSummary& b) {
    if (a.paths.size() != b.paths.size()) return false;
    for (std::size_t i = 0; i < a.paths.size(); ++i)
        if (!same_summary(a.paths[i], b.paths[i])) return false;
    return a.failures == b.failures && same_bits(a.p_hat, b.p_hat) &&
           same_bits(a.mean_in_band_fraction, b.mean_in_band_fraction) &&
           same_bits(a.mean_capital_efficiency, b.mean_capital_efficiency) &&
           same_bits(a.median_terminal_p_omega, b.median_terminal_p_omega) &&
           same_bits(a.ponzi.anchor_margin, b.ponzi.anchor_margin) &&
           a.ponzi.inflow_dependence == b.ponzi.inflow_dependence &&
           a.ponzi.verdict == b.ponzi.verdict;
}

TrilemmaPoint pt(double d, double e, double s) { return {d, e, s, {s, s}, ""}; }

}  // namespace

TEST_CASE("price impact") {
    CHECK(price_impact(1.3, 0.0, 500.0) == 1.3);
    CHECK(price_impact(2.0, 500.0, 500.0) == doctest::Approx(2.0 * std::exp(1.0)).epsilon(1e-15));
    CHECK(price_impact(1.0, 10.0, 100.0) > 1.0);
    CHECK(price_impact(1.0, -10.0, 100.0) < 1.0);
    for (double f : {-5000.0, -12.5, 0.3, 777.0, 1e4}) {
        const double back = price_impact(price_impact(0.97, f, 2e4), -f, 2e4);
        CHECK(std::abs(back - 0.97) <= 1e-12 * 0.97);
    }
}

TEST_CASE("stress window") {
    const ScenarioConfig c = test::small_config();
    const StressOverlay rwa{StressKind::RwaShortfall, 10, 1.0, 5};
    const auto before = apply_stress(c.assets, c.demand, 9, rwa);
    CHECK(before.specs[1].yield == c.assets[1].yield);
    for (std::int64_t t = 10; t < 15; ++t) CHECK(apply_stress(c.assets, c.demand, t, rwa).specs[1].yield == 0.0);
    CHECK(apply_stress(c.assets, c.demand, 15, rwa).specs[1].yield == c.assets[1].yield);

    const StressOverlay demand{StressKind::DemandCollapse, 0, 0.25, 3};
    CHECK(apply_stress(c.assets, c.demand, 1, demand).demand.base_inflow ==
          doctest::Approx(0.75 * c.demand.base_inflow));

    const StressOverlay crash{StressKind::CryptoCrash, 4, 0.5, 10};
    const auto at = apply_stress(c.assets, c.demand, 4, crash);
    CHECK(at.level_multiplier[0] == 0.5);
    CHECK(at.level_multiplier[1] == 1.0);
    CHECK(at.specs[0].vol == doctest::Approx(1.5 * c.assets[0].vol));
    CHECK(apply_stress(c.assets, c.demand, 5, crash).level_multiplier[0] == 1.0);
    CHECK(apply_stress(c.assets, c.demand, 3, crash).specs[0].vol == c.assets[0].vol);
}

TEST_CASE("crypto crash halves the crypto price at onset") {
    ScenarioConfig c = test::quiescent_config();
    c.stress = StressOverlay{StressKind::CryptoCrash, 3, 0.5, 5};
    c.validate();
    ProtocolState s = initial_protocol_state(c);
    for (int t = 1; t <= 2; ++t) s = transition(s, c, StepShocks::zero(2)).state;
    const double before = s.collateral[0].asset_price;
    s = transition(s, c, StepShocks::zero(2)).state;
    CHECK(s.collateral[0].asset_price == doctest::Approx(0.5 * before).epsilon(1e-12));
    CHECK(s.collateral[1].asset_price == 1.0);
}

TEST_CASE("quiescent trace is flat and fully in band") {
    const ScenarioConfig c = test::quiescent_config();
    const SimTrace t = simulate_path(c, 0);
    REQUIRE(t.records.size() == static_cast<std::size_t>(c.horizon));
    const SimRecord& first = t.records.front();
    for (const SimRecord& r : t.records) {
        SimRecord shifted = r;
        shifted.t = first.t;
        CHECK(same_record(shifted, first));
        CHECK(r.in_band);
        CHECK_FALSE(r.failed);
    }
    CHECK(summarize_path(t, c).in_band_fraction == 1.0);
    CHECK(t.records.back().t == c.horizon);
}

TEST_CASE("paths are deterministic and distinct across indices") {
    const ScenarioConfig c = test::small_config();
    const SimTrace a = simulate_path(c, 3), b = simulate_path(c, 3), other = simulate_path(c, 4);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) CHECK(same_record(a.records[i], b.records[i]));
    CHECK_FALSE(same_bits(a.records.back().p_a, other.records.back().p_a));
}

TEST_CASE("singleton ensemble equals its path") {
    const ScenarioConfig c = test::small_config();
    const EnsembleSummary e = monte_carlo(c, 1);
    const PathSummary p = summarize_path(simulate_path(c, 0), c);
    CHECK(same_summary(e.paths[0], p));
    CHECK(e.mean_in_band_fraction == p.in_band_fraction);
    CHECK(e.mean_terminal_p_a == p.terminal_p_a);
    CHECK(e.median_terminal_p_omega == p.terminal_p_omega);
    CHECK(e.p_hat == (p.failed ? 1.0 : 0.0));
}

TEST_CASE("split runs pool to the full run") {
    const ScenarioConfig c = test::small_config();
    auto first = run_paths(c, 50, 1, 0);
    const auto second = run_paths(c, 50, 1, 50);
    first.insert(first.end(), second.begin(), second.end());
    CHECK(same_ensemble(summarize_ensemble(first, c), monte_carlo(c, 100)));
}

TEST_CASE("ensemble independent of worker count") {
    const ScenarioConfig c = load_preset("janus_baseline").config;
    const EnsembleSummary one = monte_carlo(c, 64, 1);
    CHECK(same_ensemble(one, monte_carlo(c, 64, 4)));
    CHECK(same_ensemble(one, monte_carlo(c, 64, 8)));
}

TEST_CASE("dominance and the pareto front") {
    CHECK(dominates(pt(1, 1, 1), pt(0, 0, 0)));
    CHECK(dominates(pt(1, 0, 0), pt(0, 0, 0)));
    CHECK_FALSE(dominates(pt(0, 0, 0), pt(0, 0, 0)));
    CHECK_FALSE(dominates(pt(1, 0, 0), pt(0, 1, 0)));

    std::vector<FrontierPoint> pts(4);
    pts[0].point = pt(0.5, 0.5, 0.5);
    pts[1].point = pt(0.4, 0.4, 0.4);  // dominated by 0 in all three
    pts[2].point = pt(0.9, 0.1, 0.5);
    pts[3].point = pt(0.5, 0.5, 0.5);  // tie with 0
    mark_pareto(pts);
    CHECK(pts[0].pareto);
    CHECK_FALSE(pts[1].pareto);
    CHECK(pts[2].pareto);
    CHECK(pts[3].pareto);
}

TEST_CASE("grid cell application") {
    const ScenarioConfig base = test::small_config();
    const ScenarioConfig c = apply_grid_cell(base, 1.5, 0.03, 0.5, std::vector<double>{0.3, 0.7});
    CHECK(c.mint_policy.min_collateral_ratio == 1.5);
    CHECK(c.band.epsilon == 0.03);
    CHECK(c.controller.fee_gain == 0.5 * base.controller.fee_gain);
    CHECK(c.treasury.target_weights == std::vector<double>{0.3, 0.7});
    const double total = c.initial_state.collateral_values[0] + c.initial_state.collateral_values[1];
    CHECK(c.initial_state.collateral_values[0] == doctest::Approx(0.3 * total));
    CHECK(c.initial_state.alpha.supply ==
          doctest::Approx(base.initial_state.alpha.supply * 1.2 / 1.5).epsilon(1e-12));
    CHECK(c.initial_state.omega.supply ==
          doctest::Approx(base.initial_state.omega.supply * 1.2 / 1.5).epsilon(1e-12));
    CHECK_THROWS_AS(apply_grid_cell(base, std::nullopt, std::nullopt, std::nullopt,
                                    std::vector<double>{0.3, 0.6}),
                    ValidationError);
}

TEST_CASE("single-cell frontier is on the front") {
    const ScenarioConfig base = test::small_config();
    FrontierGrid g;
    g.epsilon = {0.02};
    const auto pts = frontier_sweep(base, g, 20);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].pareto);
}

TEST_CASE("raising the collateral ratio lowers efficiency along the sweep") {
    const ScenarioConfig base = load_preset("janus_baseline").config;
    FrontierGrid g;
    g.min_collateral_ratio = {1.1, 1.2, 1.5, 2.0};
    const auto pts = frontier_sweep(base, g, 200);
    REQUIRE(pts.size() == 4);
    for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].point.e < pts[i - 1].point.e);
    // Safety is flat within sampling noise here: failures come from peg breaks,
    // not insolvency, so more backing cannot lower it beyond noise.
    for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].point.s >= pts[0].point.s_ci.lo);
}

TEST_CASE("baseline trace trends upward in band") {
    const ScenarioConfig c = load_preset("janus_baseline").config;
    const SimTrace t = simulate_path(c, 0);
    const PathSummary p = summarize_path(t, c);
    CHECK(p.in_band_fraction >= 0.95);
    CHECK(t.records.back().p_a > t.records.front().p_a);
    CHECK(t.records.back().p_omega > t.records.front().p_omega);
    CHECK(t.records.back().p_ref > t.records.front().p_ref);
}

TEST_CASE("rwa yield anchors omega without new buyers") {
    ScenarioConfig c = load_preset("janus_baseline").config;
    c.demand.base_inflow = 0.0;
    const EnsembleSummary e = monte_carlo(c, 200);
    CHECK(e.omega_floor_fraction >= 0.99);
    CHECK(e.ponzi.anchor_margin <= 0.0);
}

TEST_CASE("failure is sticky and recorded at the first failing step") {
    ScenarioConfig c = test::quiescent_config();
    c.initial_state.alpha.price = 1.2;
    c.initial_state.collateral_values = {6000.0, 9000.0};
    c.failure.grace = 3;
    c.validate();
    const SimTrace t = simulate_path(c, 0);
    REQUIRE(t.failed);
    REQUIRE(t.failure_step.has_value());
    bool seen = false;
    for (const SimRecord& r : t.records) {
        if (r.t == *t.failure_step) seen = true;
        CHECK(r.failed == seen);
    }
    CHECK(t.records.size() == static_cast<std::size_t>(c.horizon));
}
