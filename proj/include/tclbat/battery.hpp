#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tclbat/fleet.hpp"
#include "tclbat/regulation.hpp"

#include "json.hpp"

namespace tclbat {

enum class BatteryKind { necessary, sufficient };

/// Generalized battery phi = (C, n_-, n_+, alpha): signals u with
/// -n_- <= u <= n_+ whose leaky state of charge xdot = -alpha x - u stays
/// within |x| <= C.
struct BatteryParams {
    double capacity_kwh = 0.0;
    double n_minus_kw = 0.0;
    double n_plus_kw = 0.0;
    double alpha_per_h = 0.0;
    BatteryKind kind = BatteryKind::necessary;
};

void to_json(nlohmann::json& j, const BatteryParams& p);

/// State-of-charge samples, x[0] = 0, one sample per signal sample plus the
/// initial point.
struct SocTrajectory {
    std::vector<double> x_kwh;
    double sample_period_s = 1.0;
};

/// Exact exponential discretization of xdot = -alpha x - u with zero-order
/// hold on u.
SocTrajectory soc_evolve(const BatteryParams& phi, const RegulationTrace& u);

struct MembershipReport {
    enum class Violation { none, power_lower, power_upper, capacity };
    bool member = true;
    Violation kind = Violation::none;
    std::size_t sample = 0;  // first violating sample
    double value = 0.0;      // offending u (kW) or x (kWh)
    double bound = 0.0;
};

/// Checks power bounds at every sample and the capacity bound along the
/// exact SoC trajectory, with 1e-9 absolute slack.
MembershipReport is_member(const BatteryParams& phi, const RegulationTrace& u);

/// Outer (necessary) battery parameters for the fleet at dissipation alpha.
BatteryParams necessary_params(const Fleet& fleet, double alpha_per_h);
BatteryParams necessary_params(std::span<const TclUnit> units, double alpha_per_h);

struct SufficientModel {
    BatteryParams params;
    std::vector<double> beta;  // per-unit allocation weights, sums to 1
};

/// Inner (sufficient) battery parameters with the proportional allocation
/// beta^k = (P_m^k - P_o^k) / sum (P_m - P_o), which is tightest for n_+.
SufficientModel sufficient_params(const Fleet& fleet, double alpha_per_h);
SufficientModel sufficient_params(std::span<const TclUnit> units, double alpha_per_h);

/// Same with a caller-supplied allocation (non-negative, summing to 1).
SufficientModel sufficient_params(std::span<const TclUnit> units, double alpha_per_h,
                                  std::span<const double> beta);

/// Causal allocation e^k = beta^k u of a fleet-level deviation.
std::vector<double> allocate_power(double u_kw, std::span<const double> beta);

/// Mismatch penalty f^k = Delta^k / (b^k (1 + |1 - alpha/a^k|)).
double unit_capacity_term(const TclParameters& p, double alpha_per_h);

}  // namespace tclbat
