#include "tclbat/dispatch.hpp"

#include <algorithm>
#include <cmath>

namespace tclbat {

namespace {

double normalized_distance(const TclUnit& u) {
    return (u.state.theta_c - u.params.lower_band_c()) / (2.0 * u.params.delta_c);
}

}  // namespace

PriorityStacks priority_sort(const Fleet& fleet) {
    PriorityStacks stacks;
    for (std::size_t k = 0; k < fleet.size(); ++k) {
        const TclUnit& u = fleet.units[k];
        if (u.state.lockout > 0) continue;
        if (u.state.on) {
            // Turning OFF at or above the upper edge would leave the band.
            if (u.state.theta_c < u.params.upper_band_c()) stacks.on_stack.push_back(k);
        } else {
            if (u.state.theta_c > u.params.lower_band_c()) stacks.off_stack.push_back(k);
        }
    }
    auto hotter = [&](std::size_t a, std::size_t b) {
        const double da = normalized_distance(fleet.units[a]);
        const double db = normalized_distance(fleet.units[b]);
        if (da != db) return da > db;
        return a < b;
    };
    auto cooler = [&](std::size_t a, std::size_t b) {
        const double da = normalized_distance(fleet.units[a]);
        const double db = normalized_distance(fleet.units[b]);
        if (da != db) return da < db;
        return a < b;
    };
    std::sort(stacks.off_stack.begin(), stacks.off_stack.end(), hotter);
    std::sort(stacks.on_stack.begin(), stacks.on_stack.end(), cooler);
    return stacks;
}

std::vector<SwitchCommand> PriorityStackController::plan(const Fleet& fleet, std::size_t /*step*/,
                                                         double r_kw, double delta_kw) {
    std::vector<SwitchCommand> cmds;
    double residual = r_kw - delta_kw;
    if (residual == 0.0) return cmds;

    const PriorityStacks stacks = priority_sort(fleet);
    const bool turn_on = residual > 0.0;
    const std::vector<std::size_t>& stack = turn_on ? stacks.off_stack : stacks.on_stack;
    for (std::size_t k : stack) {
        const double p_m = fleet.units[k].params.p_m_kw;
        const double after = turn_on ? residual - p_m : residual + p_m;
        if (std::fabs(after) >= std::fabs(residual)) break;  // switch would not shrink the miss
        cmds.push_back({k, turn_on});
        residual = after;
    }
    return cmds;
}

AvailablePowers worst_case_available_powers(std::span<const LedgerRow> history,
                                          const RegulationTrace& r, std::size_t t,
                                          double p_tot_kw, double p_ave_kw, int tau_samples) {
    if (t >= history.size() || t >= r.size())
        throw Error("availability query beyond the recorded history");

    double off_sum = 0.0;
    double on_sum = 0.0;
    const std::size_t k_lo = t >= static_cast<std::size_t>(tau_samples)
                                 ? t - static_cast<std::size_t>(tau_samples)
                                 : 0;
    for (std::size_t k = k_lo; k <= t; ++k) {
        const double d = r.dr_kw(k) - (history[k].p_lim_off_on_kw - history[k].p_lim_on_off_kw);
        off_sum += history[k].p_lim_on_off_kw + std::max(-d, 0.0);
        on_sum += history[k].p_lim_off_on_kw + std::max(d, 0.0);
    }

    AvailablePowers out;
    out.p_off_avail_kw = p_tot_kw - p_ave_kw - r.r_kw[t] - off_sum;
    out.p_on_avail_kw = p_ave_kw + r.r_kw[t] - on_sum;
    if (out.p_off_avail_kw < 0.0 || out.p_on_avail_kw < 0.0) {
        out.saturated = true;
        out.p_off_avail_kw = std::max(out.p_off_avail_kw, 0.0);
        out.p_on_avail_kw = std::max(out.p_on_avail_kw, 0.0);
    }
    return out;
}

AvailablePowers worst_case_available_powers(const Fleet& fleet, std::span<const LedgerRow> history,
                                          const RegulationTrace& r, std::size_t t) {
    double p_tot = 0.0;
    for (const TclUnit& u : fleet.units) p_tot += u.params.p_m_kw;
    // P_ave is the tracked baseline (cycle-average draw), consistent with
    // P_on(t) = P_ave + r(t) when the signal is met.
    return worst_case_available_powers(history, r, t, p_tot, baseline_power(fleet),
                                     fleet.tau_samples);
}

RampBounds ramp_bounds(std::span<const LedgerRow> rows, std::size_t t) {
    if (t < 1 || t >= rows.size()) throw Error("ramp bounds require 1 <= t < horizon");
    const double lim_max = std::max(rows[t].p_lim_on_off_kw, rows[t].p_lim_off_on_kw);
    return {std::max(0.0, rows[t - 1].p_off_avail_kw - lim_max),
            std::max(0.0, rows[t - 1].p_on_avail_kw - lim_max)};
}

FeasibilityReport feasibility_screen(Fleet fleet, const BatteryParams& phi_s,
                                     const RegulationTrace& r) {
    FeasibilityReport report;

    const MembershipReport membership = is_member(phi_s, r);
    if (!membership.member) {
        FeasibilityReport::BatteryViolation v;
        v.sample = membership.sample;
        v.value = membership.value;
        switch (membership.kind) {
            case MembershipReport::Violation::power_upper:
                v.bound = "n_plus";
                break;
            case MembershipReport::Violation::power_lower:
                v.bound = "n_minus";
                break;
            default:
                v.bound = "capacity";
                break;
        }
        report.battery = v;
    }

    PriorityStackController controller;
    const SimulationTrace trace = simulate(fleet, r.size(), &controller, &r);

    double p_tot = 0.0;
    for (const TclUnit& u : fleet.units) p_tot += u.params.p_m_kw;
    const int tau = fleet.tau_samples;

    for (std::size_t t = 1; t < trace.rows.size(); ++t) {
        const AvailablePowers pred =
            worst_case_available_powers(trace.rows, r, t - 1, p_tot, trace.baseline_kw, tau);
        const double lim_max =
            std::max(trace.rows[t].p_lim_on_off_kw, trace.rows[t].p_lim_off_on_kw);
        const double mu_plus = std::max(0.0, pred.p_off_avail_kw - lim_max);
        const double mu_minus = std::max(0.0, pred.p_on_avail_kw - lim_max);
        const double dr = r.dr_kw(t);
        if (dr > mu_plus) {
            report.ramp = FeasibilityReport::RampViolation{t, mu_plus, dr};
            break;
        }
        if (dr < -mu_minus) {
            report.ramp = FeasibilityReport::RampViolation{t, -mu_minus, dr};
            break;
        }
    }
    return report;
}

}  // namespace tclbat
