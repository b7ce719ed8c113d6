#include "tclbat/battery.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tclbat {

namespace {

constexpr double kBoundSlack = 1e-9;  // absorbs floating-point noise in bound checks

void require_positive_alpha(double alpha_per_h) {
    if (!(alpha_per_h > 0.0)) throw Error("dissipation alpha must be positive");
}

// Nominal power and headroom with the degenerate case P_m == P_o reported
// as a zero-flexibility error rather than a set-point error.
double checked_headroom(const TclParameters& p, double& po) {
    po = (p.theta_a_c - p.theta_r_c) / (p.eta * p.r_c_per_kw);
    if (!(po > 0.0)) nominal_power(p);  // throws SetpointError
    const double headroom = p.p_m_kw - po;
    if (!(headroom > 0.0))
        throw ZeroFlexibilityError("unit has no headroom above nominal power (P_m == P_o)");
    return headroom;
}

}  // namespace

void to_json(nlohmann::json& j, const BatteryParams& p) {
    j = nlohmann::json{{"capacity_kwh", p.capacity_kwh},
                       {"n_minus_kw", p.n_minus_kw},
                       {"n_plus_kw", p.n_plus_kw},
                       {"alpha_per_h", p.alpha_per_h},
                       {"kind", p.kind == BatteryKind::necessary ? "necessary" : "sufficient"}};
}

double unit_capacity_term(const TclParameters& p, double alpha_per_h) {
    const double mismatch = 1.0 + std::fabs(1.0 - alpha_per_h / p.a_per_h());
    return p.delta_c / (p.b_c_per_kwh() * mismatch);
}

SocTrajectory soc_evolve(const BatteryParams& phi, const RegulationTrace& u) {
    require_positive_alpha(phi.alpha_per_h);
    SocTrajectory traj;
    traj.sample_period_s = u.sample_period_s;
    traj.x_kwh.resize(u.size() + 1);
    traj.x_kwh[0] = 0.0;
    const double dt_h = u.sample_period_s / 3600.0;
    const double decay = std::exp(-phi.alpha_per_h * dt_h);
    for (std::size_t i = 0; i < u.size(); ++i) {
        // x(dt) = x0 e^{-a dt} - (u/a)(1 - e^{-a dt}) for constant u
        traj.x_kwh[i + 1] =
            traj.x_kwh[i] * decay - u.r_kw[i] / phi.alpha_per_h * (1.0 - decay);
    }
    return traj;
}

MembershipReport is_member(const BatteryParams& phi, const RegulationTrace& u) {
    MembershipReport rep;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u.r_kw[i] > phi.n_plus_kw + kBoundSlack) {
            rep.member = false;
            rep.kind = MembershipReport::Violation::power_upper;
            rep.sample = i;
            rep.value = u.r_kw[i];
            rep.bound = phi.n_plus_kw;
            return rep;
        }
        if (u.r_kw[i] < -phi.n_minus_kw - kBoundSlack) {
            rep.member = false;
            rep.kind = MembershipReport::Violation::power_lower;
            rep.sample = i;
            rep.value = u.r_kw[i];
            rep.bound = -phi.n_minus_kw;
            return rep;
        }
    }
    const SocTrajectory traj = soc_evolve(phi, u);
    for (std::size_t i = 1; i < traj.x_kwh.size(); ++i) {
        if (std::fabs(traj.x_kwh[i]) > phi.capacity_kwh + kBoundSlack) {
            rep.member = false;
            rep.kind = MembershipReport::Violation::capacity;
            rep.sample = i - 1;  // the sample whose hold first breaches capacity
            rep.value = traj.x_kwh[i];
            rep.bound = phi.capacity_kwh;
            return rep;
        }
    }
    return rep;
}

BatteryParams necessary_params(std::span<const TclUnit> units, double alpha_per_h) {
    require_positive_alpha(alpha_per_h);
    if (units.empty()) throw Error("battery parameters of an empty fleet");
    BatteryParams phi;
    phi.alpha_per_h = alpha_per_h;
    phi.kind = BatteryKind::necessary;
    for (const TclUnit& u : units) {
        const TclParameters& p = u.params;
        const double po = nominal_power(p);
        phi.capacity_kwh +=
            (1.0 + std::fabs(1.0 - p.a_per_h() / alpha_per_h)) * p.delta_c / p.b_c_per_kwh();
        phi.n_minus_kw += po;
        phi.n_plus_kw += p.p_m_kw - po;
    }
    return phi;
}

BatteryParams necessary_params(const Fleet& fleet, double alpha_per_h) {
    return necessary_params(std::span<const TclUnit>(fleet.units), alpha_per_h);
}

SufficientModel sufficient_params(std::span<const TclUnit> units, double alpha_per_h) {
    require_positive_alpha(alpha_per_h);
    if (units.empty()) throw Error("battery parameters of an empty fleet");
    double headroom_total = 0.0;
    std::vector<double> headroom(units.size());
    for (std::size_t k = 0; k < units.size(); ++k) {
        double po;
        headroom[k] = checked_headroom(units[k].params, po);
        headroom_total += headroom[k];
    }

    SufficientModel model;
    model.beta.reserve(units.size());
    for (double h : headroom) model.beta.push_back(h / headroom_total);
    return sufficient_params(units, alpha_per_h, model.beta);
}

SufficientModel sufficient_params(const Fleet& fleet, double alpha_per_h) {
    return sufficient_params(std::span<const TclUnit>(fleet.units), alpha_per_h);
}

SufficientModel sufficient_params(std::span<const TclUnit> units, double alpha_per_h,
                                  std::span<const double> beta) {
    require_positive_alpha(alpha_per_h);
    if (beta.size() != units.size()) throw Error("allocation size does not match fleet size");
    double beta_sum = 0.0;
    for (double b : beta) {
        if (b < 0.0) throw Error("allocation weights must be non-negative");
        beta_sum += b;
    }
    if (std::fabs(beta_sum - 1.0) > 1e-9) throw Error("allocation weights must sum to 1");

    // Tightest parameters satisfying beta^k C <= f^k, beta^k n_- <= P_o^k,
    // beta^k n_+ <= P_m^k - P_o^k for every unit.
    SufficientModel model;
    model.beta.assign(beta.begin(), beta.end());
    model.params.alpha_per_h = alpha_per_h;
    model.params.kind = BatteryKind::sufficient;
    double cap = std::numeric_limits<double>::infinity();
    double n_minus = std::numeric_limits<double>::infinity();
    double n_plus = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < units.size(); ++k) {
        if (beta[k] == 0.0) continue;
        const TclParameters& p = units[k].params;
        double po;
        const double headroom = checked_headroom(p, po);
        cap = std::min(cap, unit_capacity_term(p, alpha_per_h) / beta[k]);
        n_minus = std::min(n_minus, po / beta[k]);
        n_plus = std::min(n_plus, headroom / beta[k]);
    }
    model.params.capacity_kwh = cap;
    model.params.n_minus_kw = n_minus;
    model.params.n_plus_kw = n_plus;
    return model;
}

std::vector<double> allocate_power(double u_kw, std::span<const double> beta) {
    std::vector<double> e;
    e.reserve(beta.size());
    for (double b : beta) e.push_back(b * u_kw);
    return e;
}

}  // namespace tclbat
