#include "tclbat/fleet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tclbat/rng.hpp"

namespace tclbat {

namespace {

double draw_param(const ParamDist& d, std::size_t k, std::size_t n, Rng& rng) {
    switch (d.kind) {
        case DistKind::fixed:
            return d.lo;
        case DistKind::uniform:
            return rng.uniform(d.lo, d.hi);
        case DistKind::grid:
            if (n <= 1) return d.lo;
            return d.lo + (d.hi - d.lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    }
    return d.lo;
}

void check_dist(const ParamDist& d, const char* name) {
    if (!(d.lo <= d.hi)) throw SpecInfeasibleError(std::string("heterogeneity bounds inverted for ") + name);
}

}  // namespace

Fleet build_fleet(std::size_t n, const HeterogeneitySpec& spec, int tau_samples,
                  std::uint64_t seed) {
    if (n < 1) throw SpecInfeasibleError("fleet must contain at least one unit");
    if (tau_samples < 0) throw SpecInfeasibleError("lockout duration must be non-negative");
    check_dist(spec.c_kwh_per_c, "C");
    check_dist(spec.r_c_per_kw, "R");
    check_dist(spec.p_m_kw, "P_m");
    check_dist(spec.eta, "eta");
    check_dist(spec.theta_r_c, "theta_r");
    check_dist(spec.delta_c, "delta");

    Fleet fleet;
    fleet.tau_samples = tau_samples;
    fleet.rng_seed = seed;
    fleet.units.reserve(n);
    Rng rng(seed);

    for (std::size_t k = 0; k < n; ++k) {
        TclUnit unit;
        unit.params.c_kwh_per_c = draw_param(spec.c_kwh_per_c, k, n, rng);
        unit.params.r_c_per_kw = draw_param(spec.r_c_per_kw, k, n, rng);
        unit.params.p_m_kw = draw_param(spec.p_m_kw, k, n, rng);
        unit.params.eta = draw_param(spec.eta, k, n, rng);
        unit.params.theta_r_c = draw_param(spec.theta_r_c, k, n, rng);
        unit.params.delta_c = draw_param(spec.delta_c, k, n, rng);
        unit.params.theta_a_c = spec.theta_a_c;
        try {
            validate_parameters(unit.params);
        } catch (const SpecInfeasibleError& e) {
            throw SpecInfeasibleError("unit " + std::to_string(k) + ": " + e.what());
        }

        // Uniformly random point along the noise-free steady cycle: the ON
        // phase runs from the upper band edge down, the OFF phase back up.
        const CycleTimes ct = cycle_times(unit.params);
        const double phase_h = rng.uniform() * (ct.t_on_h + ct.t_off_h);
        const TclParameters& p = unit.params;
        if (phase_h < ct.t_on_h) {
            unit.state.on = true;
            const double theta_inf = p.theta_a_c - p.r_c_per_kw * p.p_m_kw * p.eta;
            unit.state.theta_c = theta_inf + (p.upper_band_c() - theta_inf) * std::exp(-p.a_per_h() * phase_h);
        } else {
            unit.state.on = false;
            const double t_off = phase_h - ct.t_on_h;
            unit.state.theta_c =
                p.theta_a_c + (p.lower_band_c() - p.theta_a_c) * std::exp(-p.a_per_h() * t_off);
        }
        unit.state.lockout = 0;
        fleet.units.push_back(unit);
    }
    return fleet;
}

double baseline_power(const Fleet& fleet) {
    double sum = 0.0;
    for (const TclUnit& u : fleet.units) sum += average_power(u.params);
    return sum;
}

double aggregate_power(const Fleet& fleet) {
    double sum = 0.0;
    for (const TclUnit& u : fleet.units)
        if (u.state.on) sum += u.params.p_m_kw;
    return sum;
}

SimulationTrace simulate(Fleet& fleet, std::size_t horizon, DispatchController* controller,
                         const RegulationTrace* r, const SimulationOptions& options) {
    if (r) {
        if (r->size() < horizon)
            throw ConfigError("regulation trace shorter than the simulation horizon");
        if (std::fabs(r->sample_period_s - fleet.sample_period_s) > 1e-9)
            throw ConfigError("regulation trace sample period does not match the fleet");
        for (std::size_t t = 0; t < horizon; ++t)
            if (!std::isfinite(r->r_kw[t]))
                throw ConfigError("regulation trace contains a non-finite sample");
    }

    SimulationTrace trace;
    trace.baseline_kw = baseline_power(fleet);
    for (const TclUnit& u : fleet.units) trace.p_tot_kw += u.params.p_m_kw;
    trace.rows.reserve(horizon);

    const std::size_t n = fleet.size();
    const double dt_h = fleet.dt_h();
    const int tau = fleet.tau_samples;
    Rng noise_rng(fleet.rng_seed ^ 0x9e3779b97f4a7c15ull);

    std::vector<char> switched(n, 0);
    std::vector<long> last_switch(n, -1);

    auto avail_split = [&](double& on_avail, double& on_unavail, double& off_avail,
                           double& off_unavail) {
        on_avail = on_unavail = off_avail = off_unavail = 0.0;
        for (const TclUnit& u : fleet.units) {
            const bool avail = u.state.lockout == 0;
            if (u.state.on) {
                (avail ? on_avail : on_unavail) += u.params.p_m_kw;
            } else {
                (avail ? off_avail : off_unavail) += u.params.p_m_kw;
            }
        }
    };

    double prev_on_avail, prev_off_avail, unused_a, unused_b;
    avail_split(prev_on_avail, unused_a, prev_off_avail, unused_b);

    auto note_switch = [&](std::size_t k, std::size_t step) {
        switched[k] = 1;
        if (last_switch[k] >= 0) {
            const int gap = static_cast<int>(step) - static_cast<int>(last_switch[k]);
            if (trace.min_switch_gap_samples < 0 || gap < trace.min_switch_gap_samples)
                trace.min_switch_gap_samples = gap;
        }
        last_switch[k] = static_cast<long>(step);
    };

    for (std::size_t t = 0; t < horizon; ++t) {
        std::fill(switched.begin(), switched.end(), 0);
        double p_lim_on_off = 0.0;
        double p_lim_off_on = 0.0;

        // (1) exact temperature update, (2) local hysteresis flips
        for (std::size_t k = 0; k < n; ++k) {
            TclUnit& u = fleet.units[k];
            const double noise =
                options.noise_sigma_c_per_h > 0.0 ? options.noise_sigma_c_per_h * noise_rng.gaussian() : 0.0;
            const DeadbandStep ds = step_deadband(u.params, u.state, dt_h, noise, tau);
            const double excess = std::max(ds.theta_raw_c - u.params.upper_band_c(),
                                           u.params.lower_band_c() - ds.theta_raw_c);
            if (excess > trace.max_band_excess_c) trace.max_band_excess_c = excess;
            if (ds.flip > 0) p_lim_off_on += u.params.p_m_kw;
            if (ds.flip < 0) p_lim_on_off += u.params.p_m_kw;
            if (ds.flip != 0) {
                if (ds.forced_short_cycle) ++trace.forced_short_cycle_incidents;
                note_switch(k, t);
            }
            u.state = ds.state;
        }

        const double r_t = r ? r->r_kw[t] : 0.0;
        const double delta_pre = aggregate_power(fleet) - trace.baseline_kw;

        // (3) controller switches
        double p_cmd_on = 0.0;
        double p_cmd_off = 0.0;
        if (controller) {
            for (const SwitchCommand& cmd : controller->plan(fleet, t, r_t, delta_pre)) {
                if (cmd.unit >= n) throw ContractViolationError("switch command for unknown unit");
                TclUnit& u = fleet.units[cmd.unit];
                if (u.state.lockout > 0)
                    throw ContractViolationError("switch command for locked unit " + std::to_string(cmd.unit));
                if (u.state.on == cmd.turn_on)
                    throw ContractViolationError("switch command repeats the current mode");
                if (cmd.turn_on && u.state.theta_c <= u.params.lower_band_c())
                    throw ContractViolationError("turning on a unit at or below its lower band edge");
                if (!cmd.turn_on && u.state.theta_c >= u.params.upper_band_c())
                    throw ContractViolationError("turning off a unit at or above its upper band edge");
                u.state.on = cmd.turn_on;
                u.state.lockout = tau;
                (cmd.turn_on ? p_cmd_on : p_cmd_off) += u.params.p_m_kw;
                note_switch(cmd.unit, t);
            }
        }

        LedgerRow row;
        row.t_s = static_cast<double>(t) * fleet.sample_period_s;
        row.r_kw = r_t;
        row.p_agg_kw = aggregate_power(fleet);
        row.delta_kw = row.p_agg_kw - trace.baseline_kw;
        row.p_on_kw = row.p_agg_kw;
        row.p_off_kw = trace.p_tot_kw - row.p_on_kw;
        avail_split(row.p_on_avail_kw, row.p_on_unavail_kw, row.p_off_avail_kw, row.p_off_unavail_kw);
        row.p_lim_on_off_kw = p_lim_on_off;
        row.p_lim_off_on_kw = p_lim_off_on;
        row.p_sw_on_off_kw = p_lim_on_off + p_cmd_off;
        row.p_sw_off_on_kw = p_lim_off_on + p_cmd_on;
        const double dr = r ? r->dr_kw(t) : 0.0;
        row.d_kw = dr - (p_lim_off_on - p_lim_on_off);
        const double lim_max = std::max(p_lim_on_off, p_lim_off_on);
        row.mu_plus_kw = std::max(0.0, prev_off_avail - lim_max);
        row.mu_minus_kw = std::max(0.0, prev_on_avail - lim_max);
        prev_on_avail = row.p_on_avail_kw;
        prev_off_avail = row.p_off_avail_kw;
        trace.rows.push_back(row);

        // (4) lockout decrement; a switch this step keeps its full lockout,
        // so a unit switched at s stays unavailable through step s+tau.
        for (std::size_t k = 0; k < n; ++k) {
            TclState& st = fleet.units[k].state;
            if (!switched[k] && st.lockout > 0) --st.lockout;
        }

        if (options.record_unit_states) {
            std::vector<TclState> snapshot;
            snapshot.reserve(n);
            for (const TclUnit& u : fleet.units) snapshot.push_back(u.state);
            trace.unit_states.push_back(std::move(snapshot));
        }
    }
    return trace;
}

}  // namespace tclbat
