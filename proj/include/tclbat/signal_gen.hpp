#pragma once

#include <cstdint>
#include <vector>

#include "tclbat/regulation.hpp"

namespace tclbat {

/// Equal-weight sum of sinusoids, normalized so |r| <= amplitude_kw.
RegulationTrace sinusoid_signal(std::size_t samples, double sample_period_s, double amplitude_kw,
                                const std::vector<double>& periods_s);

/// AR(1)-filtered Gaussian noise rescaled to peak |r| = amplitude_kw.
RegulationTrace filtered_noise_signal(std::size_t samples, double sample_period_s,
                                      double amplitude_kw, double corr_time_s,
                                      std::uint64_t seed);

/// Piecewise-linear profile with one interval of sustained negative ramp:
/// settle at zero, ramp down to level_lo_kw, hold, ramp up to level_hi_kw,
/// then crash back down to level_lo_kw and hold to the end.
struct RampDipSpec {
    double settle_s = 60.0;
    double down_rate_kw_per_s = 5.0;
    double level_lo_kw = -300.0;
    double hold_s = 60.0;
    double up_rate_kw_per_s = 9.0;
    double level_hi_kw = 200.0;
    double crash_rate_kw_per_s = 12.0;
};

RegulationTrace ramp_dip_signal(std::size_t samples, double sample_period_s,
                                const RampDipSpec& spec);

}  // namespace tclbat
