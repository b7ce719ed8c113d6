#pragma once

#include "tclbat/errors.hpp"

namespace tclbat {

/// Physical constants of a single cooling TCL (residential air conditioner).
///
/// The thermal rate a = 1/(R*C) and gain b = eta/C are derived on demand so
/// they can never be stored inconsistently with R, C, eta.
struct TclParameters {
    double c_kwh_per_c = 2.0;     // thermal capacitance
    double r_c_per_kw = 2.0;      // thermal resistance
    double p_m_kw = 5.6;          // rated electrical power
    double eta = 2.5;             // coefficient of performance
    double theta_r_c = 22.5;      // temperature set-point
    double delta_c = 0.3125;      // half dead-band width
    double theta_a_c = 32.0;      // ambient temperature

    double a_per_h() const { return 1.0 / (r_c_per_kw * c_kwh_per_c); }
    double b_c_per_kwh() const { return eta / c_kwh_per_c; }
    double lower_band_c() const { return theta_r_c - delta_c; }
    double upper_band_c() const { return theta_r_c + delta_c; }
};

/// Throws SpecInfeasibleError unless the parameters describe a well-posed
/// cooling unit: positive constants, OFF drift heats (theta_a above the
/// band) and ON drift cools past the lower band edge.
void validate_parameters(const TclParameters& p);

struct TclState {
    double theta_c = 22.5;  // internal temperature
    bool on = false;        // operating mode q
    int lockout = 0;        // samples until the unit may be externally switched
};

/// Result of one dead-band step.  flip is +1 for a local OFF->ON switch,
/// -1 for ON->OFF, 0 for none.  theta_raw_c is the integrated temperature
/// before edge clamping (used for overshoot accounting).
struct DeadbandStep {
    TclState state;
    int flip = 0;
    bool forced_short_cycle = false;
    double theta_raw_c = 0.0;
};

/// Advances the hybrid dead-band model by dt_h using the exact exponential
/// solution of the affine ODE, then applies the hysteresis switching law.
/// A local flip clamps theta to the crossed band edge and resets lockout
/// to tau_samples; a flip while still locked is allowed (comfort band wins)
/// and reported as a forced short cycle.
DeadbandStep step_deadband(const TclParameters& p, const TclState& s, double dt_h,
                           double noise_c_per_h, int tau_samples);

/// Continuous-power model: exact exponential update of
/// dtheta/dt = -a (theta - theta_a) - b p over dt_h.  Requires p in [0, P_m].
double step_continuous(const TclParameters& p, double theta_c, double p_kw, double dt_h);

struct CycleTimes {
    double t_on_h = 0.0;
    double t_off_h = 0.0;
};

/// ON and OFF state durations per hysteresis cycle (the two log formulas).
CycleTimes cycle_times(const TclParameters& p);

/// Cycle-average electrical power P_m * T_on / (T_on + T_off).
double average_power(const TclParameters& p);

/// Power holding the unit exactly at its set-point: (theta_a - theta_r)/(eta R).
/// Must lie strictly inside (0, P_m).
double nominal_power(const TclParameters& p);

}  // namespace tclbat
