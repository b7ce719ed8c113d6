#include "tclbat/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tclbat/battery.hpp"

namespace tclbat {

namespace {

// Sorted view of the fleet plus fast-path flags for interval capacities.
struct SortedFleet {
    const Fleet* fleet = nullptr;
    std::vector<std::size_t> order;
    std::vector<TclUnit> units;  // in sorted order
    bool c_only = false;         // heterogeneity only in C (sorted by C)
    bool delta_only = false;     // heterogeneity only in Delta (sorted by Delta)
};

SortedFleet sort_fleet(const Fleet& fleet, ClusterSortKey key) {
    SortedFleet sf;
    sf.fleet = &fleet;
    const HeterogeneityFlags flags = heterogeneity_flags(fleet.units);
    if (key == ClusterSortKey::auto_detect) {
        if (flags.only_delta() && flags.delta)
            key = ClusterSortKey::deadband;
        else
            key = ClusterSortKey::thermal_capacitance;
    }
    sf.order.resize(fleet.size());
    std::iota(sf.order.begin(), sf.order.end(), std::size_t{0});
    auto value = [&](std::size_t i) {
        const TclParameters& p = fleet.units[i].params;
        switch (key) {
            case ClusterSortKey::deadband:
                return p.delta_c;
            case ClusterSortKey::unit_index:
                return static_cast<double>(i);
            default:
                return p.c_kwh_per_c;
        }
    };
    std::stable_sort(sf.order.begin(), sf.order.end(),
                     [&](std::size_t a, std::size_t b) { return value(a) < value(b); });
    sf.units.reserve(fleet.size());
    for (std::size_t i : sf.order) sf.units.push_back(fleet.units[i]);
    sf.c_only = flags.only_c() && key == ClusterSortKey::thermal_capacitance;
    sf.delta_only = flags.only_delta() && key == ClusterSortKey::deadband;
    return sf;
}

// Optimal dissipation and capacity of sorted units [lo, hi).  Closed forms
// keep this O(1) for single-parameter heterogeneity, which the DP relies on
// for large fleets.
DissipationResult interval_capacity(const SortedFleet& sf, std::size_t lo, std::size_t hi) {
    const std::size_t n = hi - lo;
    if (sf.c_only) {
        const TclParameters& p = sf.units[lo].params;  // C_min: sorted ascending
        DissipationResult res;
        res.method = DissipationMethod::closed_form_C;
        res.alpha_star_per_h = 1.0 / (p.r_c_per_kw * p.c_kwh_per_c);
        res.capacity_star_kwh = static_cast<double>(n) * p.delta_c * p.c_kwh_per_c / p.eta;
        return res;
    }
    if (sf.delta_only) {
        const TclParameters& p = sf.units[lo].params;  // Delta_min: sorted ascending
        DissipationResult res;
        res.method = DissipationMethod::closed_form_delta;
        res.alpha_star_per_h = p.a_per_h();
        res.capacity_star_kwh = static_cast<double>(n) * p.c_kwh_per_c * p.delta_c / p.eta;
        return res;
    }
    return optimal_alpha_numeric(std::span<const TclUnit>(sf.units).subspan(lo, n));
}

ClusterAssignment assemble(const SortedFleet& sf, const std::vector<std::size_t>& splits) {
    ClusterAssignment out;
    out.order = sf.order;
    out.boundaries = splits;
    std::size_t lo = 0;
    for (std::size_t i = 0; i <= splits.size(); ++i) {
        const std::size_t hi = i < splits.size() ? splits[i] : sf.units.size();
        out.sizes.push_back(hi - lo);
        DissipationResult res = interval_capacity(sf, lo, hi);
        out.total_capacity_kwh += res.capacity_star_kwh;
        out.clusters.push_back(std::move(res));
        lo = hi;
    }
    return out;
}

bool is_affine_c_grid(const Fleet& fleet) {
    const HeterogeneityFlags flags = heterogeneity_flags(fleet.units);
    if (!flags.only_c()) return false;
    const std::size_t n = fleet.size();
    if (n == 1) return true;
    std::vector<double> c;
    c.reserve(n);
    for (const TclUnit& u : fleet.units) c.push_back(u.params.c_kwh_per_c);
    std::sort(c.begin(), c.end());
    const double c_min = c.front(), c_max = c.back();
    const double step = (c_max - c_min) / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k) {
        const double expect = c_min + step * static_cast<double>(k);
        if (std::fabs(c[k] - expect) > 1e-9 * std::max(1.0, std::fabs(expect))) return false;
    }
    return true;
}

}  // namespace

double cluster_capacity_closed_form(std::size_t n, std::size_t m, double c_min, double c_max,
                                    double delta_c, double eta) {
    if (m < 1 || m > n) throw Error("cluster count must satisfy 1 <= m <= N");
    double c_eff = c_min;
    if (m > 1) {
        c_eff += (c_max - c_min) / 2.0 * (static_cast<double>(n) / static_cast<double>(n - 1)) *
                 (static_cast<double>(m - 1) / static_cast<double>(m));
    }
    return c_eff * static_cast<double>(n) * delta_c / eta;
}

ClusterAssignment optimal_clusters_uniform(const Fleet& fleet, std::size_t m) {
    if (m < 1 || m > fleet.size()) throw Error("cluster count must satisfy 1 <= m <= N");
    if (!is_affine_c_grid(fleet))
        throw WrongHeterogeneityError("equal-size clustering requires an affine C grid; use the DP");
    if (fleet.size() % m != 0)
        throw WrongHeterogeneityError("equal-size clustering requires m | N; use the DP");

    SortedFleet sf = sort_fleet(fleet, ClusterSortKey::thermal_capacitance);
    std::vector<std::size_t> splits;
    const std::size_t size = fleet.size() / m;
    for (std::size_t i = 1; i < m; ++i) splits.push_back(i * size);
    return assemble(sf, splits);
}

ClusterAssignment optimal_clusters_dp(const Fleet& fleet, std::size_t m, ClusterSortKey key) {
    const std::size_t n = fleet.size();
    if (m < 1 || m > n) throw Error("cluster count must satisfy 1 <= m <= N");
    SortedFleet sf = sort_fleet(fleet, key);

    // cap[lo][hi-lo-1] memo is only needed column-by-column; with O(1)
    // closed-form intervals we just evaluate on demand.
    const double neg_inf = -std::numeric_limits<double>::infinity();
    std::vector<double> prev(n + 1, neg_inf);
    std::vector<double> cur(n + 1, neg_inf);
    std::vector<std::vector<std::size_t>> parent(m + 1, std::vector<std::size_t>(n + 1, 0));

    std::vector<std::vector<double>> cap_cache;  // cap_cache[lo][hi-lo-1]
    const bool memoize = !(sf.c_only || sf.delta_only);
    if (memoize) cap_cache.assign(n, {});
    auto cap = [&](std::size_t lo, std::size_t hi) -> double {
        if (!memoize) return interval_capacity(sf, lo, hi).capacity_star_kwh;
        auto& row = cap_cache[lo];
        const std::size_t idx = hi - lo - 1;
        while (row.size() <= idx) row.push_back(std::numeric_limits<double>::quiet_NaN());
        if (std::isnan(row[idx])) row[idx] = interval_capacity(sf, lo, hi).capacity_star_kwh;
        return row[idx];
    };

    for (std::size_t j = 1; j <= n; ++j) prev[j] = cap(0, j);
    for (std::size_t i = 2; i <= m; ++i) {
        std::fill(cur.begin(), cur.end(), neg_inf);
        for (std::size_t j = i; j <= n; ++j) {
            for (std::size_t s = i - 1; s < j; ++s) {
                if (prev[s] == neg_inf) continue;
                const double total = prev[s] + cap(s, j);
                if (total > cur[j]) {
                    cur[j] = total;
                    parent[i][j] = s;
                }
            }
        }
        std::swap(prev, cur);
    }

    std::vector<std::size_t> splits(m - 1);
    std::size_t j = n;
    for (std::size_t i = m; i >= 2; --i) {
        splits[i - 2] = parent[i][j];
        j = parent[i][j];
    }
    return assemble(sf, splits);
}

ClusterAssignment optimal_clusters_auto(const Fleet& fleet, std::size_t m) {
    try {
        return optimal_clusters_uniform(fleet, m);
    } catch (const WrongHeterogeneityError&) {
        return optimal_clusters_dp(fleet, m);
    }
}

std::vector<SweepRow> capacity_gap_sweep(const SweepSpec& spec) {
    std::vector<SweepRow> rows;
    for (const double w : spec.c_halfwidths) {
        HeterogeneitySpec hs;
        hs.c_kwh_per_c = w > 0.0
                             ? ParamDist::grid(spec.nominal.c_kwh_per_c - w, spec.nominal.c_kwh_per_c + w)
                             : ParamDist::fixed(spec.nominal.c_kwh_per_c);
        hs.r_c_per_kw = ParamDist::fixed(spec.nominal.r_c_per_kw);
        hs.p_m_kw = ParamDist::fixed(spec.nominal.p_m_kw);
        hs.eta = ParamDist::fixed(spec.nominal.eta);
        hs.theta_r_c = ParamDist::fixed(spec.nominal.theta_r_c);
        hs.delta_c = ParamDist::fixed(spec.nominal.delta_c);
        hs.theta_a_c = spec.nominal.theta_a_c;
        const Fleet fleet = build_fleet(spec.n, hs, 60, 0);

        double alpha_nominal = 0.0;  // mean of the unit time constants 1/(R C)
        for (const TclUnit& u : fleet.units) alpha_nominal += u.params.a_per_h();
        alpha_nominal /= static_cast<double>(fleet.size());

        auto emit = [&](const std::string& config, double suff, double nec) {
            rows.push_back({w, config, suff, nec});
        };

        emit("nominal_m1", sufficient_params(fleet, alpha_nominal).params.capacity_kwh,
             necessary_params(fleet, alpha_nominal).capacity_kwh);

        const DissipationResult opt = w > 0.0 ? optimal_alpha_C_hetero(fleet)
                                              : optimal_alpha_numeric(fleet);
        emit("optimal_m1", opt.capacity_star_kwh,
             necessary_params(fleet, opt.alpha_star_per_h).capacity_kwh);

        const ClusterAssignment clusters = optimal_clusters_dp(fleet, spec.m);
        double nec_clustered = 0.0;
        std::size_t lo = 0;
        for (std::size_t i = 0; i < clusters.sizes.size(); ++i) {
            std::vector<TclUnit> cluster_units;
            cluster_units.reserve(clusters.sizes[i]);
            for (std::size_t k = lo; k < lo + clusters.sizes[i]; ++k)
                cluster_units.push_back(fleet.units[clusters.order[k]]);
            nec_clustered += necessary_params(std::span<const TclUnit>(cluster_units),
                                              clusters.clusters[i].alpha_star_per_h)
                                 .capacity_kwh;
            lo += clusters.sizes[i];
        }
        emit("optimal_m" + std::to_string(spec.m), clusters.total_capacity_kwh, nec_clustered);
    }
    return rows;
}

}  // namespace tclbat
