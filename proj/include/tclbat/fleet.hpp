#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tclbat/regulation.hpp"
#include "tclbat/tcl_model.hpp"

namespace tclbat {

struct TclUnit {
    TclParameters params;
    TclState state;
};

enum class DistKind { fixed, uniform, grid };

/// Distribution descriptor for one physical parameter across the fleet.
/// grid places unit k (1-based) at lo + (hi-lo)(k-1)/(N-1): the sorted
/// affine realization of a uniform distribution.
struct ParamDist {
    DistKind kind = DistKind::fixed;
    double lo = 0.0;
    double hi = 0.0;

    static ParamDist fixed(double v) { return {DistKind::fixed, v, v}; }
    static ParamDist uniform(double lo, double hi) { return {DistKind::uniform, lo, hi}; }
    static ParamDist grid(double lo, double hi) { return {DistKind::grid, lo, hi}; }
};

/// Per-parameter heterogeneity; the ambient temperature is shared by every
/// unit in a scenario.
struct HeterogeneitySpec {
    ParamDist c_kwh_per_c = ParamDist::fixed(2.0);
    ParamDist r_c_per_kw = ParamDist::fixed(2.0);
    ParamDist p_m_kw = ParamDist::fixed(5.6);
    ParamDist eta = ParamDist::fixed(2.5);
    ParamDist theta_r_c = ParamDist::fixed(22.5);
    ParamDist delta_c = ParamDist::fixed(0.3125);
    double theta_a_c = 32.0;
};

struct Fleet {
    std::vector<TclUnit> units;
    double sample_period_s = 1.0;
    int tau_samples = 60;
    std::uint64_t rng_seed = 0;

    std::size_t size() const { return units.size(); }
    double dt_h() const { return sample_period_s / 3600.0; }
};

/// Builds a fleet of n units.  Parameters are drawn (or placed on the grid)
/// per their descriptors; each unit starts at a uniformly random phase of its
/// noise-free steady cycle with lockout 0.  Deterministic given the seed.
Fleet build_fleet(std::size_t n, const HeterogeneitySpec& spec, int tau_samples,
                  std::uint64_t seed);

/// Baseline power n(t) = sum of per-unit cycle-average powers (time invariant).
double baseline_power(const Fleet& fleet);

/// Instantaneous aggregate power sum_k q^k P_m^k at the current states.
double aggregate_power(const Fleet& fleet);

struct SwitchCommand {
    std::size_t unit = 0;
    bool turn_on = false;
};

/// Dispatch hook invoked once per step after local hysteresis flips.
/// delta_kw is the aggregate deviation from baseline at that point.
class DispatchController {
public:
    virtual ~DispatchController() = default;
    virtual std::vector<SwitchCommand> plan(const Fleet& fleet, std::size_t step,
                                            double r_kw, double delta_kw) = 0;
};

struct SimulationOptions {
    double noise_sigma_c_per_h = 0.0;  // per-step Gaussian temperature-rate noise
    bool record_unit_states = false;
};

struct SimulationTrace {
    double baseline_kw = 0.0;
    double p_tot_kw = 0.0;
    AvailabilityLedger rows;
    std::vector<std::vector<TclState>> unit_states;  // per step, when recorded
    long forced_short_cycle_incidents = 0;
    double max_band_excess_c = 0.0;  // worst pre-clamp dead-band overshoot
    int min_switch_gap_samples = -1;  // smallest gap between any unit's switches (-1: none)
};

/// Advances every unit by horizon samples.  Intra-step order: exact
/// temperature update, local hysteresis flips, controller switches, lockout
/// decrement.  Controller commands on locked or band-violating units raise
/// ContractViolationError.  r may be null (treated as identically zero).
SimulationTrace simulate(Fleet& fleet, std::size_t horizon, DispatchController* controller = nullptr,
                         const RegulationTrace* r = nullptr, const SimulationOptions& options = {});

}  // namespace tclbat
