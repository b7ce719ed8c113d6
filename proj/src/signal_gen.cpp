#include "tclbat/signal_gen.hpp"

#include <cmath>

#include "tclbat/errors.hpp"
#include "tclbat/rng.hpp"

namespace tclbat {

RegulationTrace sinusoid_signal(std::size_t samples, double sample_period_s, double amplitude_kw,
                                const std::vector<double>& periods_s) {
    if (periods_s.empty()) throw ConfigError("sinusoid signal needs at least one period");
    RegulationTrace trace;
    trace.sample_period_s = sample_period_s;
    trace.r_kw.resize(samples);
    const double scale = amplitude_kw / static_cast<double>(periods_s.size());
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (std::size_t t = 0; t < samples; ++t) {
        const double time_s = static_cast<double>(t) * sample_period_s;
        double v = 0.0;
        for (double period : periods_s) v += std::sin(two_pi * time_s / period);
        trace.r_kw[t] = scale * v;
    }
    return trace;
}

RegulationTrace filtered_noise_signal(std::size_t samples, double sample_period_s,
                                      double amplitude_kw, double corr_time_s,
                                      std::uint64_t seed) {
    if (!(corr_time_s > 0.0)) throw ConfigError("correlation time must be positive");
    RegulationTrace trace;
    trace.sample_period_s = sample_period_s;
    trace.r_kw.resize(samples);
    Rng rng(seed);
    const double rho = std::exp(-sample_period_s / corr_time_s);
    double y = 0.0;
    double peak = 0.0;
    for (std::size_t t = 0; t < samples; ++t) {
        y = rho * y + rng.gaussian();
        trace.r_kw[t] = y;
        peak = std::max(peak, std::fabs(y));
    }
    if (peak > 0.0) {
        const double scale = amplitude_kw / peak;
        for (double& v : trace.r_kw) v *= scale;
    }
    return trace;
}

RegulationTrace ramp_dip_signal(std::size_t samples, double sample_period_s,
                                const RampDipSpec& spec) {
    if (!(spec.down_rate_kw_per_s > 0.0) || !(spec.up_rate_kw_per_s > 0.0) ||
        !(spec.crash_rate_kw_per_s > 0.0))
        throw ConfigError("ramp rates must be positive");
    if (!(spec.level_lo_kw < 0.0) || !(spec.level_hi_kw > spec.level_lo_kw))
        throw ConfigError("ramp-dip levels must satisfy level_lo < 0 and level_hi > level_lo");

    RegulationTrace trace;
    trace.sample_period_s = sample_period_s;
    trace.r_kw.resize(samples);
    enum Phase { settle, down, hold, up, crash, floor };
    Phase phase = settle;
    double value = 0.0;
    double phase_elapsed_s = 0.0;
    for (std::size_t t = 0; t < samples; ++t) {
        trace.r_kw[t] = value;
        const double dt = sample_period_s;
        phase_elapsed_s += dt;
        switch (phase) {
            case settle:
                if (phase_elapsed_s >= spec.settle_s) phase = down;
                break;
            case down:
                value -= spec.down_rate_kw_per_s * dt;
                if (value <= spec.level_lo_kw) {
                    value = spec.level_lo_kw;
                    phase = hold;
                    phase_elapsed_s = 0.0;
                }
                break;
            case hold:
                if (phase_elapsed_s >= spec.hold_s) phase = up;
                break;
            case up:
                value += spec.up_rate_kw_per_s * dt;
                if (value >= spec.level_hi_kw) {
                    value = spec.level_hi_kw;
                    phase = crash;
                }
                break;
            case crash:
                value -= spec.crash_rate_kw_per_s * dt;
                if (value <= spec.level_lo_kw) {
                    value = spec.level_lo_kw;
                    phase = floor;
                }
                break;
            case floor:
                break;
        }
    }
    return trace;
}

}  // namespace tclbat
