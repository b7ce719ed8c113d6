#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "tclbat/battery.hpp"
#include "tclbat/fleet.hpp"

namespace tclbat {

enum class DissipationMethod { closed_form_C, closed_form_delta, numeric };

struct DissipationResult {
    double alpha_star_per_h = 0.0;
    double capacity_star_kwh = 0.0;
    DissipationMethod method = DissipationMethod::numeric;
    std::size_t binding_unit = 0;  // lowest-index unit attaining the min
    std::vector<std::pair<double, double>> curve;  // optional (alpha, objective) samples
};

/// Max-min objective min_k f^k / (P_m^k - P_o^k); the sufficient capacity is
/// n_+ times this value.
double capacity_objective(std::span<const TclUnit> units, double alpha_per_h);
double capacity_objective(const Fleet& fleet, double alpha_per_h);

/// Lowest-index unit attaining the min at this alpha.
std::size_t binding_unit(std::span<const TclUnit> units, double alpha_per_h);

/// Golden-section search over [min_k a^k, max_k a^k] (the objective is a
/// min of tent-shaped terms peaking at the a^k, so it is unimodal there),
/// followed by an exact re-evaluation at every breakpoint a^k so that peaks
/// sitting on a breakpoint are returned exactly.
DissipationResult optimal_alpha_numeric(std::span<const TclUnit> units,
                                        std::optional<std::pair<double, double>> bracket = {},
                                        bool with_curve = false);
DissipationResult optimal_alpha_numeric(const Fleet& fleet,
                                        std::optional<std::pair<double, double>> bracket = {},
                                        bool with_curve = false);

/// Closed form for heterogeneity only in C: alpha* = 1/(R C_min),
/// C* = N Delta C_min / eta.  Throws WrongHeterogeneityError off-hypothesis.
DissipationResult optimal_alpha_C_hetero(std::span<const TclUnit> units);
DissipationResult optimal_alpha_C_hetero(const Fleet& fleet);

/// Closed form for heterogeneity only in Delta: alpha* = 1/(R C),
/// C* = N C Delta_min / eta.
DissipationResult optimal_alpha_delta_hetero(std::span<const TclUnit> units);
DissipationResult optimal_alpha_delta_hetero(const Fleet& fleet);

/// Reported bounds for mixed C/Delta heterogeneity; the numeric search stays
/// the authoritative solver.
struct MixedHeteroBounds {
    double capacity_lower_kwh = 0.0;  // N C_min Delta_min / eta
    double alpha_upper_per_h = 0.0;   // 1 / (R C_min)
};
MixedHeteroBounds mixed_hetero_bounds(const Fleet& fleet);

/// Which parameters vary across the fleet (exact comparison against unit 0).
struct HeterogeneityFlags {
    bool c = false, r = false, p_m = false, eta = false, theta_r = false, delta = false;
    bool only_c() const { return !r && !p_m && !eta && !theta_r && !delta; }
    bool only_delta() const { return !c && !r && !p_m && !eta && !theta_r; }
    bool only_c_delta() const { return !r && !p_m && !eta && !theta_r; }
};
HeterogeneityFlags heterogeneity_flags(std::span<const TclUnit> units);

}  // namespace tclbat
