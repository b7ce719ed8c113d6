#include "tclbat/dissipation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tclbat {

namespace {

constexpr double kGoldenTol = 1e-10;  // bracket width termination, 1/h

double objective_term(const TclParameters& p, double alpha_per_h) {
    return unit_capacity_term(p, alpha_per_h) / (p.p_m_kw - nominal_power(p));
}

DissipationResult finish(std::span<const TclUnit> units, double alpha, DissipationMethod method) {
    DissipationResult res;
    res.alpha_star_per_h = alpha;
    res.method = method;
    res.binding_unit = binding_unit(units, alpha);
    res.capacity_star_kwh = sufficient_params(units, alpha).params.capacity_kwh;
    return res;
}

}  // namespace

HeterogeneityFlags heterogeneity_flags(std::span<const TclUnit> units) {
    HeterogeneityFlags flags;
    if (units.empty()) return flags;
    const TclParameters& first = units.front().params;
    for (const TclUnit& u : units) {
        const TclParameters& p = u.params;
        flags.c |= p.c_kwh_per_c != first.c_kwh_per_c;
        flags.r |= p.r_c_per_kw != first.r_c_per_kw;
        flags.p_m |= p.p_m_kw != first.p_m_kw;
        flags.eta |= p.eta != first.eta;
        flags.theta_r |= p.theta_r_c != first.theta_r_c;
        flags.delta |= p.delta_c != first.delta_c;
    }
    return flags;
}

double capacity_objective(std::span<const TclUnit> units, double alpha_per_h) {
    if (units.empty()) throw Error("objective of an empty fleet");
    double best = std::numeric_limits<double>::infinity();
    for (const TclUnit& u : units) best = std::min(best, objective_term(u.params, alpha_per_h));
    return best;
}

double capacity_objective(const Fleet& fleet, double alpha_per_h) {
    return capacity_objective(std::span<const TclUnit>(fleet.units), alpha_per_h);
}

std::size_t binding_unit(std::span<const TclUnit> units, double alpha_per_h) {
    std::size_t arg = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < units.size(); ++k) {
        const double term = objective_term(units[k].params, alpha_per_h);
        if (term < best) {
            best = term;
            arg = k;
        }
    }
    return arg;
}

DissipationResult optimal_alpha_numeric(std::span<const TclUnit> units,
                                        std::optional<std::pair<double, double>> bracket,
                                        bool with_curve) {
    if (units.empty()) throw Error("optimal dissipation of an empty fleet");

    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const TclUnit& u : units) {
        lo = std::min(lo, u.params.a_per_h());
        hi = std::max(hi, u.params.a_per_h());
    }
    if (bracket) {
        lo = bracket->first;
        hi = bracket->second;
        if (!(lo > 0.0) || !(hi >= lo)) throw Error("invalid dissipation bracket");
    }

    auto eval = [&](double alpha) { return capacity_objective(units, alpha); };

    DissipationResult res;
    if (hi - lo > kGoldenTol) {
        constexpr double inv_phi = 0.6180339887498948482;
        double a = lo, b = hi;
        double x1 = b - inv_phi * (b - a);
        double x2 = a + inv_phi * (b - a);
        double f1 = eval(x1), f2 = eval(x2);
        while (b - a > kGoldenTol) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = eval(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = eval(x1);
            }
        }
        res.alpha_star_per_h = 0.5 * (a + b);
    } else {
        res.alpha_star_per_h = lo;
    }

    // The peak frequently sits exactly on a breakpoint alpha = a^k; checking
    // them costs O(N^2) worst case and returns those optima exactly.
    double best = eval(res.alpha_star_per_h);
    for (const TclUnit& u : units) {
        const double a_k = u.params.a_per_h();
        if (a_k < lo || a_k > hi) continue;
        const double val = eval(a_k);
        if (val > best) {
            best = val;
            res.alpha_star_per_h = a_k;
        }
    }

    if (with_curve) {
        constexpr int kCurveSamples = 257;
        res.curve.reserve(kCurveSamples);
        for (int i = 0; i < kCurveSamples; ++i) {
            const double alpha = lo + (hi - lo) * i / (kCurveSamples - 1);
            res.curve.emplace_back(alpha, eval(alpha));
        }
    }

    DissipationResult out = finish(units, res.alpha_star_per_h, DissipationMethod::numeric);
    out.curve = std::move(res.curve);
    return out;
}

DissipationResult optimal_alpha_numeric(const Fleet& fleet,
                                        std::optional<std::pair<double, double>> bracket,
                                        bool with_curve) {
    return optimal_alpha_numeric(std::span<const TclUnit>(fleet.units), bracket, with_curve);
}

DissipationResult optimal_alpha_C_hetero(std::span<const TclUnit> units) {
    if (units.empty()) throw Error("optimal dissipation of an empty fleet");
    if (!heterogeneity_flags(units).only_c())
        throw WrongHeterogeneityError(
            "closed form requires heterogeneity only in C; use the numeric search");
    double c_min = units.front().params.c_kwh_per_c;
    for (const TclUnit& u : units) c_min = std::min(c_min, u.params.c_kwh_per_c);
    const TclParameters& p = units.front().params;
    DissipationResult res = finish(units, 1.0 / (p.r_c_per_kw * c_min), DissipationMethod::closed_form_C);
    res.capacity_star_kwh = static_cast<double>(units.size()) * p.delta_c * c_min / p.eta;
    return res;
}

DissipationResult optimal_alpha_C_hetero(const Fleet& fleet) {
    return optimal_alpha_C_hetero(std::span<const TclUnit>(fleet.units));
}

DissipationResult optimal_alpha_delta_hetero(std::span<const TclUnit> units) {
    if (units.empty()) throw Error("optimal dissipation of an empty fleet");
    if (!heterogeneity_flags(units).only_delta())
        throw WrongHeterogeneityError(
            "closed form requires heterogeneity only in Delta; use the numeric search");
    double delta_min = units.front().params.delta_c;
    for (const TclUnit& u : units) delta_min = std::min(delta_min, u.params.delta_c);
    const TclParameters& p = units.front().params;
    DissipationResult res = finish(units, p.a_per_h(), DissipationMethod::closed_form_delta);
    res.capacity_star_kwh = static_cast<double>(units.size()) * p.c_kwh_per_c * delta_min / p.eta;
    return res;
}

DissipationResult optimal_alpha_delta_hetero(const Fleet& fleet) {
    return optimal_alpha_delta_hetero(std::span<const TclUnit>(fleet.units));
}

MixedHeteroBounds mixed_hetero_bounds(const Fleet& fleet) {
    if (fleet.units.empty()) throw Error("bounds of an empty fleet");
    double c_min = fleet.units.front().params.c_kwh_per_c;
    double delta_min = fleet.units.front().params.delta_c;
    for (const TclUnit& u : fleet.units) {
        c_min = std::min(c_min, u.params.c_kwh_per_c);
        delta_min = std::min(delta_min, u.params.delta_c);
    }
    const TclParameters& p = fleet.units.front().params;
    return {static_cast<double>(fleet.size()) * c_min * delta_min / p.eta,
            1.0 / (p.r_c_per_kw * c_min)};
}

}  // namespace tclbat
