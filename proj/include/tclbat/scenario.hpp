#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "tclbat/battery.hpp"
#include "tclbat/clustering.hpp"
#include "tclbat/dispatch.hpp"
#include "tclbat/fleet.hpp"
#include "tclbat/regulation.hpp"
#include "tclbat/signal_gen.hpp"

namespace tclbat {

enum class AlphaPolicy { nominal, optimal, fixed };
enum class SignalSource { none, file, synthetic };
enum class SignalKind { sinusoid, filtered_noise, ramp_dip };

/// Full description of a run, loaded from a flat key-value file with
/// sections (grammar documented in the README).
struct Scenario {
    // [fleet]
    std::size_t n = 1000;
    HeterogeneitySpec hetero;
    int tau_samples = 60;
    std::uint64_t seed = 0;

    // [simulation]
    double sample_period_s = 1.0;
    std::size_t horizon_samples = 3600;
    double noise_sigma_c_per_h = 0.0;

    // [battery]
    AlphaPolicy alpha_policy = AlphaPolicy::optimal;
    double alpha_fixed_per_h = 0.25;
    std::size_t clusters_m = 1;

    // [regulation]
    SignalSource signal_source = SignalSource::none;
    std::string signal_file;
    SignalKind signal_kind = SignalKind::sinusoid;
    double amplitude_frac_n_plus = 0.2;
    std::vector<double> periods_s = {600.0};
    double corr_time_s = 120.0;
    // ramp_dip knobs (levels as fractions of the battery bounds)
    double dip_settle_s = 60.0;
    double dip_down_rate_kw_per_s = 5.0;
    double dip_lo_frac_n_minus = 0.8;
    double dip_hold_s = 60.0;
    double dip_up_rate_kw_per_s = 9.0;
    double dip_hi_frac_n_plus = 0.3;
    double dip_crash_rate_kw_per_s = 12.0;

    // [sweep]
    std::size_t sweep_levels = 10;
    double sweep_c_halfwidth_max = 0.5;
    std::size_t sweep_m = 3;
};

Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(std::istream& in);

Fleet fleet_from_scenario(const Scenario& sc);

/// Dissipation per the scenario's alpha policy (fleet mean of 1/(R C),
/// numeric optimum, or the fixed value).
double scenario_alpha(const Scenario& sc, const Fleet& fleet);

/// Regulation signal per the scenario; synthetic amplitudes scale with the
/// sufficient battery bounds.
RegulationTrace make_signal(const Scenario& sc, const BatteryParams& phi_s);

// --- signal / trace CSV ---

RegulationTrace read_signal_csv(const std::filesystem::path& path);
void write_signal_csv(std::ostream& out, const RegulationTrace& r);
void write_trace_csv(std::ostream& out, const SimulationTrace& trace);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

// --- subcommand entry points (shared by the CLI and the test suites) ---

struct SimulateOutput {
    SimulationTrace trace;
    RegulationTrace signal;
    nlohmann::json metrics;
};

/// Runs the scenario with the priority-stack controller (when a signal is
/// configured) and computes tracking metrics.  When out_dir is given, writes
/// trace.csv, signal.csv and metrics.json there.
SimulateOutput cmd_simulate(const Scenario& sc,
                            const std::optional<std::filesystem::path>& out_dir);

/// Necessary and sufficient battery parameters at the scenario's alpha.
nlohmann::json cmd_battery(const Scenario& sc);

/// Optimal dissipation; method "auto" picks a closed form when the
/// heterogeneity is confined to a single parameter.
nlohmann::json cmd_dissipation(const Scenario& sc, const std::string& method);

/// Optimal clustering; method "auto" | "dp" | "closed".
nlohmann::json cmd_cluster(const Scenario& sc, std::size_t m, const std::string& method);

std::vector<SweepRow> cmd_sweep(const Scenario& sc);

nlohmann::json cmd_feasibility(const Scenario& sc, FeasibilityReport* out_report = nullptr);

nlohmann::json cluster_to_json(const ClusterAssignment& assignment);
nlohmann::json dissipation_to_json(const DissipationResult& res);

}  // namespace tclbat
