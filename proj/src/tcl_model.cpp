#include "tclbat/tcl_model.hpp"

#include <cmath>
#include <string>

namespace tclbat {

void validate_parameters(const TclParameters& p) {
    auto fail = [](const std::string& what) { throw SpecInfeasibleError("tcl parameters: " + what); };
    if (!(p.c_kwh_per_c > 0.0)) fail("thermal capacitance must be positive");
    if (!(p.r_c_per_kw > 0.0)) fail("thermal resistance must be positive");
    if (!(p.p_m_kw > 0.0)) fail("rated power must be positive");
    if (!(p.eta > 0.0)) fail("coefficient of performance must be positive");
    if (!(p.delta_c > 0.0)) fail("dead-band width must be positive");
    if (!(p.theta_a_c > p.upper_band_c())) fail("ambient must exceed the upper band edge (cooling load)");
    // ON drift must be able to cool past the lower band edge.
    if (!(p.theta_a_c - p.r_c_per_kw * p.p_m_kw * p.eta < p.lower_band_c()))
        fail("rated power cannot pull the unit below the lower band edge");
}

namespace {

// Exact solution of dtheta/dt = -a (theta - theta_inf) over dt.
double relax(double theta, double theta_inf, double a_per_h, double dt_h) {
    return theta_inf + (theta - theta_inf) * std::exp(-a_per_h * dt_h);
}

}  // namespace

DeadbandStep step_deadband(const TclParameters& p, const TclState& s, double dt_h,
                           double noise_c_per_h, int tau_samples) {
    const double a = p.a_per_h();
    const double drive = s.on ? p.b_c_per_kwh() * p.p_m_kw : 0.0;
    const double theta_inf = p.theta_a_c + (noise_c_per_h - drive) / a;

    DeadbandStep out;
    out.state = s;
    out.state.theta_c = relax(s.theta_c, theta_inf, a, dt_h);
    out.theta_raw_c = out.state.theta_c;
    if (!std::isfinite(out.state.theta_c))
        throw ModelDivergenceError("dead-band step produced a non-finite temperature");

    if (!s.on && out.state.theta_c >= p.upper_band_c()) {
        out.state.on = true;
        out.state.theta_c = p.upper_band_c();
        out.flip = 1;
    } else if (s.on && out.state.theta_c <= p.lower_band_c()) {
        out.state.on = false;
        out.state.theta_c = p.lower_band_c();
        out.flip = -1;
    }
    if (out.flip != 0) {
        out.forced_short_cycle = s.lockout > 0;
        out.state.lockout = tau_samples;
    }
    return out;
}

double step_continuous(const TclParameters& p, double theta_c, double p_kw, double dt_h) {
    if (p_kw < 0.0 || p_kw > p.p_m_kw)
        throw PowerBoundError("continuous-power input outside [0, P_m]");
    const double theta_inf = p.theta_a_c - p.r_c_per_kw * p.eta * p_kw;
    return relax(theta_c, theta_inf, p.a_per_h(), dt_h);
}

CycleTimes cycle_times(const TclParameters& p) {
    const double rc = p.r_c_per_kw * p.c_kwh_per_c;
    const double heat_gain = p.r_c_per_kw * p.p_m_kw * p.eta;
    const double on_num = p.upper_band_c() - p.theta_a_c + heat_gain;
    const double on_den = p.lower_band_c() - p.theta_a_c + heat_gain;
    const double off_num = p.lower_band_c() - p.theta_a_c;
    const double off_den = p.upper_band_c() - p.theta_a_c;
    if (!(on_den > 0.0) || !(on_num > on_den) || !(off_den < 0.0) || !(off_num < off_den))
        throw InfeasibleCycleError("cycle durations are not finite and positive for these parameters");
    return {rc * std::log(on_num / on_den), rc * std::log(off_num / off_den)};
}

double average_power(const TclParameters& p) {
    const CycleTimes t = cycle_times(p);
    return p.p_m_kw * t.t_on_h / (t.t_on_h + t.t_off_h);
}

double nominal_power(const TclParameters& p) {
    const double po = (p.theta_a_c - p.theta_r_c) / (p.eta * p.r_c_per_kw);
    if (!(po > 0.0) || !(po < p.p_m_kw))
        throw SetpointError("nominal power outside (0, P_m): unit cannot hold its set-point");
    return po;
}

}  // namespace tclbat
