#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tclbat/dissipation.hpp"
#include "tclbat/fleet.hpp"

namespace tclbat {

/// Partition of the fleet into m clusters, contiguous in the sorted order.
struct ClusterAssignment {
    std::vector<std::size_t> order;       // unit indices in sort-key order
    std::vector<std::size_t> boundaries;  // m-1 split positions within `order`
    std::vector<std::size_t> sizes;
    std::vector<DissipationResult> clusters;  // per-cluster optimal dissipation
    double total_capacity_kwh = 0.0;
};

/// Optimal m-cluster capacity for an affine C grid between c_min and c_max:
/// (C_min + (C_max-C_min)/2 * N/(N-1) * (m-1)/m) * N * Delta / eta.
double cluster_capacity_closed_form(std::size_t n, std::size_t m, double c_min, double c_max,
                                    double delta_c, double eta);

/// Equal-size contiguous clusters over the C-sorted order; requires an
/// affine C grid with all other parameters identical and m | N, else throws
/// WrongHeterogeneityError (callers fall back to the DP).
ClusterAssignment optimal_clusters_uniform(const Fleet& fleet, std::size_t m);

enum class ClusterSortKey { auto_detect, thermal_capacitance, deadband, unit_index };

/// Dynamic program over contiguous prefixes of the sorted order; each
/// interval's capacity is the sufficient capacity at that interval's optimal
/// dissipation.  For fleets whose heterogeneity is in multiple parameters no
/// sort key is claimed optimal; the DP returns the best contiguous partition
/// for the chosen order.
ClusterAssignment optimal_clusters_dp(const Fleet& fleet, std::size_t m,
                                      ClusterSortKey key = ClusterSortKey::auto_detect);

/// Closed form when applicable, DP otherwise.
ClusterAssignment optimal_clusters_auto(const Fleet& fleet, std::size_t m);

/// One sweep configuration: fleets with an affine C grid of the given
/// half-width around the nominal C, evaluated under nominal dissipation,
/// optimal dissipation, and optimal dissipation with m clusters.
struct SweepSpec {
    TclParameters nominal;
    std::size_t n = 1000;
    std::vector<double> c_halfwidths;
    std::size_t m = 3;
};

struct SweepRow {
    double level = 0.0;       // C half-width
    std::string config;       // nominal_m1 | optimal_m1 | optimal_m<m>
    double sufficient_kwh = 0.0;
    double necessary_kwh = 0.0;
};

/// Sufficient/necessary capacities per heterogeneity level and configuration.
/// Nominal dissipation is the fleet mean of 1/(R^k C^k).
std::vector<SweepRow> capacity_gap_sweep(const SweepSpec& spec);

}  // namespace tclbat
