#pragma once

#include <cstddef>
#include <vector>

namespace tclbat {

/// Sampled regulation signal r(t) in kW (requested deviation from baseline).
/// The first difference uses dr(0) = r(0): the boundary step is the initial
/// deviation from baseline.
struct RegulationTrace {
    std::vector<double> r_kw;
    double sample_period_s = 1.0;

    std::size_t size() const { return r_kw.size(); }

    double dr_kw(std::size_t t) const {
        return t == 0 ? r_kw[0] : r_kw[t] - r_kw[t - 1];
    }
};

/// Per-step availability accounting (Table-2 style bookkeeping).
///
/// Power terms are recorded after local hysteresis flips and controller
/// switches of the step.  A unit switched at step s counts as unavailable
/// for steps s .. s+tau inclusive.
struct LedgerRow {
    double t_s = 0.0;
    double r_kw = 0.0;
    double p_agg_kw = 0.0;
    double delta_kw = 0.0;  // p_agg - baseline

    double p_on_kw = 0.0;
    double p_off_kw = 0.0;
    double p_on_avail_kw = 0.0;
    double p_on_unavail_kw = 0.0;
    double p_off_avail_kw = 0.0;
    double p_off_unavail_kw = 0.0;

    double p_lim_on_off_kw = 0.0;  // hysteresis ON->OFF power this step
    double p_lim_off_on_kw = 0.0;  // hysteresis OFF->ON power this step
    double p_sw_on_off_kw = 0.0;   // total ON->OFF including controller
    double p_sw_off_on_kw = 0.0;   // total OFF->ON including controller

    double d_kw = 0.0;  // D(t) = dr(t) - (p_lim_off_on - p_lim_on_off)
    double mu_plus_kw = 0.0;
    double mu_minus_kw = 0.0;
};

using AvailabilityLedger = std::vector<LedgerRow>;

}  // namespace tclbat
