#include "tclbat/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"

using namespace tclbat;

namespace {

Fleet c_grid_fleet(std::size_t n, double lo = 1.5, double hi = 2.5) {
    HeterogeneitySpec spec;
    spec.c_kwh_per_c = ParamDist::grid(lo, hi);
    return build_fleet(n, spec, 60, 0);
}

// Best contiguous m-partition by explicit enumeration, with each cluster
// capacity from the numeric dissipation optimum on that slice.
double enumerate_best(const std::vector<TclUnit>& sorted_units, std::size_t m) {
    const std::size_t n = sorted_units.size();
    double best = -1.0;
    std::vector<std::size_t> sizes;
    auto recurse = [&](auto&& self, std::size_t start, std::size_t clusters_left) -> void {
        if (clusters_left == 1) {
            double total = 0.0;
            std::size_t lo = start;
            sizes.push_back(n - start);
            std::size_t pos = 0;
            lo = 0;
            for (std::size_t s : sizes) {
                total += optimal_alpha_numeric(
                             std::span<const TclUnit>(sorted_units).subspan(lo, s))
                             .capacity_star_kwh;
                lo += s;
                ++pos;
            }
            best = std::max(best, total);
            sizes.pop_back();
            return;
        }
        for (std::size_t s = 1; start + s + clusters_left - 1 <= n; ++s) {
            sizes.push_back(s);
            self(self, start + s, clusters_left - 1);
            sizes.pop_back();
        }
    };
    recurse(recurse, 0, m);
    return best;
}

std::vector<TclUnit> sorted_by_c(const Fleet& fleet) {
    std::vector<TclUnit> units = fleet.units;
    std::stable_sort(units.begin(), units.end(), [](const TclUnit& a, const TclUnit& b) {
        return a.params.c_kwh_per_c < b.params.c_kwh_per_c;
    });
    return units;
}

}  // namespace

TEST_CASE("closed-form capacity endpoints") {
    // m = 1 collapses to the single-battery optimum N Delta C_min / eta.
    CHECK(cluster_capacity_closed_form(10, 1, 1.5, 2.5, 0.3125, 2.5) ==
          doctest::Approx(10 * 0.3125 * 1.5 / 2.5).epsilon(1e-12));
    // m = N reaches the homogeneous bound N Delta Cbar / eta.
    CHECK(cluster_capacity_closed_form(10, 10, 1.5, 2.5, 0.3125, 2.5) ==
          doctest::Approx(10 * 0.3125 * 2.0 / 2.5).epsilon(1e-12));
    CHECK_THROWS_AS(cluster_capacity_closed_form(1, 2, 1.5, 2.5, 0.3125, 2.5), Error);
}

TEST_CASE("closed form matches brute force on the 4-unit grid") {
    // Grid C values {1.5, 1.8333, 2.1667, 2.5}: enumerate the three
    // contiguous 2-partitions with per-cluster capacity N_i Delta C_min,i / eta.
    const double grid[] = {1.5, 1.5 + 1.0 / 3.0, 1.5 + 2.0 / 3.0, 2.5};
    double best = -1.0;
    for (std::size_t split = 1; split <= 3; ++split) {
        const double cap = static_cast<double>(split) * 0.3125 * grid[0] / 2.5 +
                           static_cast<double>(4 - split) * 0.3125 * grid[split] / 2.5;
        best = std::max(best, cap);
    }
    CHECK(best == doctest::Approx(11.0 / 12.0).epsilon(1e-12));
    CHECK(cluster_capacity_closed_form(4, 2, 1.5, 2.5, 0.3125, 2.5) ==
          doctest::Approx(best).epsilon(1e-12));
    CHECK(cluster_capacity_closed_form(4, 2, 1.5, 2.5, 0.3125, 2.5) ==
          doctest::Approx(0.91667).epsilon(1e-4));
}

TEST_CASE("equal-size clustering on the affine grid") {
    const Fleet fleet = c_grid_fleet(4);
    const ClusterAssignment two = optimal_clusters_uniform(fleet, 2);
    CHECK(two.sizes == std::vector<std::size_t>{2, 2});
    CHECK(two.total_capacity_kwh == doctest::Approx(11.0 / 12.0).epsilon(1e-12));

    const ClusterAssignment one = optimal_clusters_uniform(fleet, 1);
    CHECK(one.sizes == std::vector<std::size_t>{4});
    CHECK(one.total_capacity_kwh == doctest::Approx(4 * 0.3125 * 1.5 / 2.5).epsilon(1e-12));

    // Capacity is nondecreasing in m.
    const Fleet eight = c_grid_fleet(8);
    double last = 0.0;
    for (std::size_t m : {1u, 2u, 4u, 8u}) {
        const double cap = optimal_clusters_uniform(eight, m).total_capacity_kwh;
        CHECK(cap >= last - 1e-12);
        last = cap;
    }

    // Sampled-uniform heterogeneity violates the grid hypothesis.
    HeterogeneitySpec sampled;
    sampled.c_kwh_per_c = ParamDist::uniform(1.5, 2.5);
    CHECK_THROWS_AS(optimal_clusters_uniform(build_fleet(8, sampled, 60, 1), 2),
                    WrongHeterogeneityError);
    // m not dividing N as well.
    CHECK_THROWS_AS(optimal_clusters_uniform(eight, 3), WrongHeterogeneityError);
    // optimal_clusters_auto falls back to the DP for both.
    CHECK(optimal_clusters_auto(eight, 3).sizes.size() == 3);
}

TEST_CASE("dp equals the closed form on affine grids") {
    for (std::size_t n : {4u, 6u, 9u, 12u}) {
        const Fleet fleet = c_grid_fleet(n);
        for (std::size_t m = 1; m <= 3; ++m) {
            if (n % m != 0) continue;
            const ClusterAssignment dp = optimal_clusters_dp(fleet, m);
            CHECK(dp.total_capacity_kwh ==
                  doctest::Approx(cluster_capacity_closed_form(n, m, 1.5, 2.5, 0.3125, 2.5))
                      .epsilon(1e-12));
        }
    }
}

TEST_CASE("dp equals exhaustive enumeration on sampled fleets") {
    HeterogeneitySpec spec;
    spec.c_kwh_per_c = ParamDist::uniform(1.4, 2.6);
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        const Fleet fleet = build_fleet(9, spec, 60, seed);
        const std::vector<TclUnit> sorted = sorted_by_c(fleet);
        for (std::size_t m : {2u, 3u}) {
            const ClusterAssignment dp = optimal_clusters_dp(fleet, m);
            CHECK(dp.total_capacity_kwh ==
                  doctest::Approx(enumerate_best(sorted, m)).epsilon(1e-12));
        }
    }
}

TEST_CASE("dp handles multi-parameter fleets over the chosen order") {
    HeterogeneitySpec spec;
    spec.c_kwh_per_c = ParamDist::uniform(1.5, 2.5);
    spec.delta_c = ParamDist::uniform(0.25, 0.375);
    const Fleet fleet = build_fleet(8, spec, 60, 3);
    const ClusterAssignment dp = optimal_clusters_dp(fleet, 3);
    const std::vector<TclUnit> sorted = sorted_by_c(fleet);
    CHECK(dp.total_capacity_kwh == doctest::Approx(enumerate_best(sorted, 3)).epsilon(1e-12));
}

TEST_CASE("every unit lands in exactly one cluster") {
    const Fleet fleet = c_grid_fleet(10);
    const ClusterAssignment dp = optimal_clusters_dp(fleet, 3);
    CHECK(std::accumulate(dp.sizes.begin(), dp.sizes.end(), std::size_t{0}) == 10);
    for (std::size_t s : dp.sizes) CHECK(s >= 1);
    std::vector<std::size_t> seen = dp.order;
    std::sort(seen.begin(), seen.end());
    for (std::size_t k = 0; k < seen.size(); ++k) CHECK(seen[k] == k);

    // Per-cluster capacity equals the sufficient model at the cluster's alpha*.
    std::size_t lo = 0;
    for (std::size_t i = 0; i < dp.sizes.size(); ++i) {
        std::vector<TclUnit> cluster;
        for (std::size_t k = lo; k < lo + dp.sizes[i]; ++k)
            cluster.push_back(fleet.units[dp.order[k]]);
        const double cap =
            sufficient_params(std::span<const TclUnit>(cluster), dp.clusters[i].alpha_star_per_h)
                .params.capacity_kwh;
        CHECK(dp.clusters[i].capacity_star_kwh == doctest::Approx(cap).epsilon(1e-9));
        lo += dp.sizes[i];
    }
}

TEST_CASE("m = N gives every unit its own battery") {
    const Fleet fleet = c_grid_fleet(6);
    const ClusterAssignment dp = optimal_clusters_dp(fleet, 6);
    double expect = 0.0;
    for (const TclUnit& u : fleet.units)
        expect += u.params.delta_c * u.params.c_kwh_per_c / u.params.eta;
    CHECK(dp.total_capacity_kwh == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("deadband-only fleets sort and cluster by Delta") {
    HeterogeneitySpec spec;
    spec.delta_c = ParamDist::grid(0.25, 0.375);
    const Fleet fleet = build_fleet(9, spec, 60, 0);
    const ClusterAssignment dp = optimal_clusters_dp(fleet, 3);
    // Equal thirds of the Delta grid, each at alpha* = 1/(R C).
    for (const DissipationResult& cluster : dp.clusters)
        CHECK(cluster.alpha_star_per_h == doctest::Approx(0.25).epsilon(1e-12));
    double expect = 0.0;
    const double step = (0.375 - 0.25) / 8.0;
    for (std::size_t i = 0; i < 3; ++i) expect += 3.0 * 2.0 * (0.25 + step * (3 * i)) / 2.5;
    CHECK(dp.total_capacity_kwh == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("capacity gap sweep orders the configurations") {
    SweepSpec spec;
    spec.n = 100;
    spec.m = 3;
    spec.c_halfwidths = {0.0, 0.1, 0.3, 0.5};
    const std::vector<SweepRow> rows = capacity_gap_sweep(spec);
    REQUIRE(rows.size() == 12);

    double last_nec = 0.0;
    for (std::size_t level = 0; level < 4; ++level) {
        const SweepRow& nominal = rows[3 * level];
        const SweepRow& optimal = rows[3 * level + 1];
        const SweepRow& clustered = rows[3 * level + 2];
        CHECK(nominal.config == "nominal_m1");
        CHECK(optimal.config == "optimal_m1");
        CHECK(clustered.config == "optimal_m3");

        const double gap_nominal = nominal.necessary_kwh - nominal.sufficient_kwh;
        const double gap_optimal = optimal.necessary_kwh - optimal.sufficient_kwh;
        const double gap_clustered = clustered.necessary_kwh - clustered.sufficient_kwh;
        CHECK(gap_nominal >= gap_optimal - 1e-9);
        CHECK(gap_optimal >= gap_clustered - 1e-9);
        CHECK(gap_nominal >= -1e-9);

        if (level == 0) {
            // Zero heterogeneity: every configuration coincides, gap 0.
            CHECK(gap_nominal == doctest::Approx(0.0).epsilon(1e-9));
            CHECK(nominal.sufficient_kwh == doctest::Approx(optimal.sufficient_kwh).epsilon(1e-9));
            CHECK(optimal.sufficient_kwh == doctest::Approx(clustered.sufficient_kwh).epsilon(1e-9));
        }
        CHECK(nominal.necessary_kwh >= last_nec - 1e-9);
        last_nec = nominal.necessary_kwh;
    }
}
