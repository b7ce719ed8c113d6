#include "tclbat/fleet.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include "doctest.h"

using namespace tclbat;

namespace {

HeterogeneitySpec homogeneous_spec() { return HeterogeneitySpec{}; }

}  // namespace

TEST_CASE("single-unit fleet starts inside the dead-band") {
    const Fleet fleet = build_fleet(1, homogeneous_spec(), 60, 3);
    REQUIRE(fleet.size() == 1);
    const TclUnit& u = fleet.units[0];
    CHECK(u.state.theta_c >= u.params.lower_band_c());
    CHECK(u.state.theta_c <= u.params.upper_band_c());
    CHECK(u.state.lockout == 0);
}

TEST_CASE("fleet construction is deterministic in the seed") {
    HeterogeneitySpec spec = homogeneous_spec();
    spec.c_kwh_per_c = ParamDist::uniform(1.5, 2.5);
    const Fleet a = build_fleet(1000, spec, 60, 42);
    const Fleet b = build_fleet(1000, spec, 60, 42);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a.units[k].params.c_kwh_per_c == b.units[k].params.c_kwh_per_c);
        CHECK(a.units[k].state.theta_c == b.units[k].state.theta_c);
        CHECK(a.units[k].state.on == b.units[k].state.on);
    }
    const Fleet c = build_fleet(1000, spec, 60, 43);
    bool any_differs = false;
    for (std::size_t k = 0; k < a.size(); ++k)
        any_differs |= a.units[k].params.c_kwh_per_c != c.units[k].params.c_kwh_per_c;
    CHECK(any_differs);
}

TEST_CASE("grid heterogeneity places units on the affine grid") {
    HeterogeneitySpec spec = homogeneous_spec();
    spec.c_kwh_per_c = ParamDist::grid(1.5, 2.5);
    const Fleet fleet = build_fleet(4, spec, 60, 0);
    const double expect[] = {1.5, 1.8333333333333333, 2.1666666666666665, 2.5};
    for (std::size_t k = 0; k < 4; ++k)
        CHECK(fleet.units[k].params.c_kwh_per_c == doctest::Approx(expect[k]).epsilon(1e-12));
}

TEST_CASE("invalid fleets are rejected at build time") {
    CHECK_THROWS_AS(build_fleet(0, homogeneous_spec(), 60, 0), SpecInfeasibleError);
    CHECK_THROWS_AS(build_fleet(2, homogeneous_spec(), -1, 0), SpecInfeasibleError);

    HeterogeneitySpec bad = homogeneous_spec();
    bad.c_kwh_per_c = ParamDist::fixed(-1.0);
    CHECK_THROWS_WITH_AS(build_fleet(2, bad, 60, 0), doctest::Contains("unit 0"),
                         SpecInfeasibleError);

    HeterogeneitySpec inverted = homogeneous_spec();
    inverted.delta_c = ParamDist::uniform(0.4, 0.3);
    CHECK_THROWS_AS(build_fleet(2, inverted, 60, 0), SpecInfeasibleError);
}

TEST_CASE("simulate rejects inconsistent regulation traces") {
    Fleet fleet = build_fleet(3, homogeneous_spec(), 60, 0);
    RegulationTrace short_r;
    short_r.sample_period_s = 1.0;
    short_r.r_kw.assign(5, 0.0);
    CHECK_THROWS_AS(simulate(fleet, 10, nullptr, &short_r), ConfigError);

    RegulationTrace coarse;
    coarse.sample_period_s = 4.0;
    coarse.r_kw.assign(10, 0.0);
    CHECK_THROWS_AS(simulate(fleet, 10, nullptr, &coarse), ConfigError);

    RegulationTrace bad;
    bad.sample_period_s = 1.0;
    bad.r_kw.assign(10, 0.0);
    bad.r_kw[4] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(simulate(fleet, 10, nullptr, &bad), ConfigError);
}

TEST_CASE("baseline power sums the per-unit averages") {
    const Fleet fleet = build_fleet(1000, homogeneous_spec(), 60, 1);
    CHECK(baseline_power(fleet) == doctest::Approx(1000.0 * average_power(fleet.units[0].params))
                                       .epsilon(1e-12));
    CHECK(baseline_power(fleet) == doctest::Approx(1899.8).epsilon(1e-4));

    const Fleet one = build_fleet(1, homogeneous_spec(), 60, 5);
    const Fleet two = build_fleet(2, homogeneous_spec(), 60, 5);
    CHECK(baseline_power(two) == doctest::Approx(2.0 * baseline_power(one)).epsilon(1e-12));
}

TEST_CASE("aggregate power counts ON units") {
    Fleet fleet = build_fleet(10, homogeneous_spec(), 60, 2);
    for (TclUnit& u : fleet.units) u.state.on = false;
    CHECK(aggregate_power(fleet) == 0.0);
    for (TclUnit& u : fleet.units) u.state.on = true;
    CHECK(aggregate_power(fleet) == doctest::Approx(10 * 5.6).epsilon(1e-12));
}

TEST_CASE("uncontrolled single unit is periodic with the cycle period") {
    Fleet fleet = build_fleet(1, homogeneous_spec(), 60, 7);
    // Start exactly at the top of the ON phase.
    fleet.units[0].state = {fleet.units[0].params.upper_band_c(), true, 0};
    const CycleTimes ct = cycle_times(fleet.units[0].params);
    const double period_s = (ct.t_on_h + ct.t_off_h) * 3600.0;

    SimulationOptions options;
    options.record_unit_states = true;
    const std::size_t horizon = 3000;
    const SimulationTrace trace = simulate(fleet, horizon, nullptr, nullptr, options);

    // Find the first two OFF->ON transitions in the recorded states.
    std::vector<std::size_t> on_flips;
    for (std::size_t t = 1; t < horizon; ++t) {
        if (trace.unit_states[t][0].on && !trace.unit_states[t - 1][0].on) on_flips.push_back(t);
    }
    REQUIRE(on_flips.size() >= 2);
    const double measured_s = static_cast<double>(on_flips[1] - on_flips[0]);
    CHECK(std::fabs(measured_s - period_s) <= 2.0);
}

TEST_CASE("zero horizon yields an empty trace") {
    Fleet fleet = build_fleet(3, homogeneous_spec(), 60, 0);
    const SimulationTrace trace = simulate(fleet, 0);
    CHECK(trace.rows.empty());
}

TEST_CASE("uncontrolled temperatures stay within one step of the band") {
    Fleet fleet = build_fleet(50, homogeneous_spec(), 60, 11);
    const SimulationTrace trace = simulate(fleet, 7200);
    CHECK(trace.max_band_excess_c < 5e-3);
    CHECK(trace.forced_short_cycle_incidents == 0);
}

TEST_CASE("power accounting holds at every step") {
    HeterogeneitySpec spec = homogeneous_spec();
    spec.p_m_kw = ParamDist::uniform(4.0, 6.0);
    Fleet fleet = build_fleet(40, spec, 60, 13);
    const SimulationTrace trace = simulate(fleet, 600);
    for (const LedgerRow& row : trace.rows) {
        CHECK(row.p_on_kw + row.p_off_kw == doctest::Approx(trace.p_tot_kw).epsilon(1e-12));
        CHECK(row.p_on_kw == doctest::Approx(row.p_on_avail_kw + row.p_on_unavail_kw).epsilon(1e-12));
        CHECK(row.p_off_kw ==
              doctest::Approx(row.p_off_avail_kw + row.p_off_unavail_kw).epsilon(1e-12));
    }
}

TEST_CASE("simulation traces are deterministic, including under noise") {
    SimulationOptions options;
    options.noise_sigma_c_per_h = 0.5;

    Fleet a = build_fleet(20, homogeneous_spec(), 60, 17);
    Fleet b = build_fleet(20, homogeneous_spec(), 60, 17);
    const SimulationTrace ta = simulate(a, 400, nullptr, nullptr, options);
    const SimulationTrace tb = simulate(b, 400, nullptr, nullptr, options);
    REQUIRE(ta.rows.size() == tb.rows.size());
    for (std::size_t t = 0; t < ta.rows.size(); ++t) {
        CHECK(std::memcmp(&ta.rows[t], &tb.rows[t], sizeof(LedgerRow)) == 0);
    }

    // The noise knob actually perturbs the trajectory.
    Fleet c = build_fleet(20, homogeneous_spec(), 60, 17);
    const SimulationTrace tc = simulate(c, 400);
    bool any_differs = false;
    for (std::size_t t = 0; t < ta.rows.size(); ++t)
        any_differs |= ta.rows[t].p_agg_kw != tc.rows[t].p_agg_kw;
    CHECK(any_differs);
}

TEST_CASE("time-averaged aggregate power approaches the baseline") {
    Fleet fleet = build_fleet(300, homogeneous_spec(), 60, 23);
    const std::size_t horizon = 5400;  // 1.5 h at 1 s
    const SimulationTrace trace = simulate(fleet, horizon);
    double mean = 0.0;
    for (std::size_t t = 1800; t < horizon; ++t) mean += trace.rows[t].p_agg_kw;
    mean /= static_cast<double>(horizon - 1800);
    CHECK(std::fabs(mean - trace.baseline_kw) / trace.baseline_kw < 0.05);
}
