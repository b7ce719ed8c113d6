#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tclbat/battery.hpp"
#include "tclbat/fleet.hpp"
#include "tclbat/regulation.hpp"

namespace tclbat {

/// Priority stacks of switchable units.  off_stack holds available OFF units
/// hottest first (first to turn ON); on_stack holds available ON units
/// coolest first (first to turn OFF).  Locked units and units a switch would
/// immediately push out of band are excluded.  Ties break on unit index.
struct PriorityStacks {
    std::vector<std::size_t> on_stack;
    std::vector<std::size_t> off_stack;
};

PriorityStacks priority_sort(const Fleet& fleet);

/// Centralized priority-stack dispatch: pops the hotter/cooler end of the
/// applicable stack while each switch strictly shrinks |delta - r|.
class PriorityStackController : public DispatchController {
public:
    std::vector<SwitchCommand> plan(const Fleet& fleet, std::size_t step, double r_kw,
                                    double delta_kw) override;
};

/// Worst-case available powers implied by the no-short-cycling window
/// (sum over k = t-tau .. t, clamped at the trace start).  Valid while the
/// regulation signal has been met through t.  Negative formula outputs are
/// floored at zero and flagged.
struct AvailablePowers {
    double p_off_avail_kw = 0.0;
    double p_on_avail_kw = 0.0;
    bool saturated = false;
};

AvailablePowers worst_case_available_powers(const Fleet& fleet, std::span<const LedgerRow> history,
                                          const RegulationTrace& r, std::size_t t);
AvailablePowers worst_case_available_powers(std::span<const LedgerRow> history,
                                          const RegulationTrace& r, std::size_t t,
                                          double p_tot_kw, double p_ave_kw, int tau_samples);

/// Ramp-rate bounds on dr(t) from the ledger's exact availabilities:
/// mu_+ = P_off_avail(t-1) - max(limit-switch powers at t), mu_- likewise
/// from P_on_avail(t-1); both floored at zero.  Requires t >= 1.
struct RampBounds {
    double mu_plus_kw = 0.0;
    double mu_minus_kw = 0.0;
};

RampBounds ramp_bounds(std::span<const LedgerRow> rows, std::size_t t);

struct FeasibilityReport {
    struct BatteryViolation {
        std::size_t sample = 0;
        std::string bound;  // "n_plus" | "n_minus" | "capacity"
        double value = 0.0;
    };
    struct RampViolation {
        std::size_t sample = 0;
        double mu_kw = 0.0;  // violated bound (signed: -mu_- for downward)
        double dr_kw = 0.0;
    };
    std::optional<BatteryViolation> battery;
    std::optional<RampViolation> ramp;
    bool pass() const { return !battery && !ramp; }
};

/// Screens a regulation signal against (i) membership in the sufficient
/// battery and (ii) the per-step ramp bounds predicted by the worst-case
/// availability formulas along a priority-stack tracking run.
FeasibilityReport feasibility_screen(Fleet fleet, const BatteryParams& phi_s,
                                     const RegulationTrace& r);

}  // namespace tclbat
