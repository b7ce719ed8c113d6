#include "tclbat/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace tclbat {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

double to_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("expected a number for " + what + ", got '" + s + "'");
    }
}

using SectionMap = std::map<std::string, std::map<std::string, std::string>>;

class ScenarioReader {
public:
    explicit ScenarioReader(SectionMap sections) : sections_(std::move(sections)) {}

    bool has(const std::string& section, const std::string& key) const {
        const auto s = sections_.find(section);
        return s != sections_.end() && s->second.count(key) > 0;
    }

    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const {
        const auto s = sections_.find(section);
        if (s == sections_.end()) return fallback;
        const auto k = s->second.find(key);
        return k == s->second.end() ? fallback : k->second;
    }

    double get_num(const std::string& section, const std::string& key, double fallback) const {
        if (!has(section, key)) return fallback;
        return to_double(get(section, key, ""), section + "." + key);
    }

    ParamDist get_dist(const std::string& section, const std::string& key,
                       const ParamDist& fallback) const {
        if (!has(section, key)) return fallback;
        const std::string raw = get(section, key, "");
        const std::vector<std::string> tok = split_ws(raw);
        const std::string what = section + "." + key;
        if (tok.size() == 1) return ParamDist::fixed(to_double(tok[0], what));
        if (tok.size() == 2 && tok[0] == "fixed") return ParamDist::fixed(to_double(tok[1], what));
        if (tok.size() == 3 && tok[0] == "uniform")
            return ParamDist::uniform(to_double(tok[1], what), to_double(tok[2], what));
        if (tok.size() == 3 && tok[0] == "grid")
            return ParamDist::grid(to_double(tok[1], what), to_double(tok[2], what));
        throw ConfigError("bad distribution '" + raw + "' for " + what +
                          " (want: fixed v | uniform lo hi | grid lo hi)");
    }

private:
    SectionMap sections_;
};

SectionMap read_sections(std::istream& in) {
    SectionMap sections;
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": key outside any [section]");
        sections[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return sections;
}

std::string fmt(double v, const char* spec) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

}  // namespace

Scenario parse_scenario(std::istream& in) {
    const ScenarioReader r(read_sections(in));
    Scenario sc;

    sc.n = static_cast<std::size_t>(r.get_num("fleet", "n", static_cast<double>(sc.n)));
    sc.tau_samples = static_cast<int>(r.get_num("fleet", "tau_samples", sc.tau_samples));
    sc.seed = static_cast<std::uint64_t>(r.get_num("fleet", "seed", 0.0));
    sc.hetero.theta_a_c = r.get_num("fleet", "theta_a_c", sc.hetero.theta_a_c);
    sc.hetero.c_kwh_per_c = r.get_dist("fleet", "c_kwh_per_c", sc.hetero.c_kwh_per_c);
    sc.hetero.r_c_per_kw = r.get_dist("fleet", "r_c_per_kw", sc.hetero.r_c_per_kw);
    sc.hetero.p_m_kw = r.get_dist("fleet", "p_m_kw", sc.hetero.p_m_kw);
    sc.hetero.eta = r.get_dist("fleet", "eta", sc.hetero.eta);
    sc.hetero.theta_r_c = r.get_dist("fleet", "theta_r_c", sc.hetero.theta_r_c);
    sc.hetero.delta_c = r.get_dist("fleet", "delta_c", sc.hetero.delta_c);

    sc.sample_period_s = r.get_num("simulation", "sample_period_s", sc.sample_period_s);
    if (!(sc.sample_period_s > 0.0)) throw ConfigError("sample period must be positive");
    const double horizon_s =
        r.get_num("simulation", "horizon_s",
                  static_cast<double>(sc.horizon_samples) * sc.sample_period_s);
    sc.horizon_samples = static_cast<std::size_t>(std::llround(horizon_s / sc.sample_period_s));
    if (sc.horizon_samples < 1) throw ConfigError("horizon must cover at least one sample");
    sc.noise_sigma_c_per_h = r.get_num("simulation", "noise_sigma_c_per_h", 0.0);

    const std::string policy = r.get("battery", "alpha_policy", "optimal");
    if (policy == "nominal")
        sc.alpha_policy = AlphaPolicy::nominal;
    else if (policy == "optimal")
        sc.alpha_policy = AlphaPolicy::optimal;
    else if (policy == "fixed")
        sc.alpha_policy = AlphaPolicy::fixed;
    else
        throw ConfigError("battery.alpha_policy must be nominal | optimal | fixed");
    sc.alpha_fixed_per_h = r.get_num("battery", "alpha_per_h", sc.alpha_fixed_per_h);
    sc.clusters_m = static_cast<std::size_t>(r.get_num("battery", "clusters_m", 1.0));

    const std::string source = r.get("regulation", "source", "none");
    if (source == "none")
        sc.signal_source = SignalSource::none;
    else if (source == "file")
        sc.signal_source = SignalSource::file;
    else if (source == "synthetic")
        sc.signal_source = SignalSource::synthetic;
    else
        throw ConfigError("regulation.source must be none | file | synthetic");
    sc.signal_file = r.get("regulation", "path", "");
    if (sc.signal_source == SignalSource::file && sc.signal_file.empty())
        throw ConfigError("regulation.path is required for a file source");

    const std::string kind = r.get("regulation", "kind", "sinusoid");
    if (kind == "sinusoid")
        sc.signal_kind = SignalKind::sinusoid;
    else if (kind == "filtered_noise")
        sc.signal_kind = SignalKind::filtered_noise;
    else if (kind == "ramp_dip")
        sc.signal_kind = SignalKind::ramp_dip;
    else
        throw ConfigError("regulation.kind must be sinusoid | filtered_noise | ramp_dip");

    sc.amplitude_frac_n_plus = r.get_num("regulation", "amplitude_frac_n_plus", sc.amplitude_frac_n_plus);
    if (r.has("regulation", "period_s")) {
        sc.periods_s.clear();
        for (const std::string& tok : split_ws(r.get("regulation", "period_s", "")))
            sc.periods_s.push_back(to_double(tok, "regulation.period_s"));
    }
    sc.corr_time_s = r.get_num("regulation", "corr_time_s", sc.corr_time_s);
    sc.dip_settle_s = r.get_num("regulation", "dip_settle_s", sc.dip_settle_s);
    sc.dip_down_rate_kw_per_s = r.get_num("regulation", "dip_down_rate_kw_per_s", sc.dip_down_rate_kw_per_s);
    sc.dip_lo_frac_n_minus = r.get_num("regulation", "dip_lo_frac_n_minus", sc.dip_lo_frac_n_minus);
    sc.dip_hold_s = r.get_num("regulation", "dip_hold_s", sc.dip_hold_s);
    sc.dip_up_rate_kw_per_s = r.get_num("regulation", "dip_up_rate_kw_per_s", sc.dip_up_rate_kw_per_s);
    sc.dip_hi_frac_n_plus = r.get_num("regulation", "dip_hi_frac_n_plus", sc.dip_hi_frac_n_plus);
    sc.dip_crash_rate_kw_per_s = r.get_num("regulation", "dip_crash_rate_kw_per_s", sc.dip_crash_rate_kw_per_s);

    sc.sweep_levels = static_cast<std::size_t>(r.get_num("sweep", "levels", static_cast<double>(sc.sweep_levels)));
    sc.sweep_c_halfwidth_max = r.get_num("sweep", "c_halfwidth_max", sc.sweep_c_halfwidth_max);
    sc.sweep_m = static_cast<std::size_t>(r.get_num("sweep", "clusters_m", static_cast<double>(sc.sweep_m)));
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file " + path.string());
    return parse_scenario(in);
}

Fleet fleet_from_scenario(const Scenario& sc) {
    Fleet fleet = build_fleet(sc.n, sc.hetero, sc.tau_samples, sc.seed);
    fleet.sample_period_s = sc.sample_period_s;
    return fleet;
}

double scenario_alpha(const Scenario& sc, const Fleet& fleet) {
    switch (sc.alpha_policy) {
        case AlphaPolicy::fixed:
            return sc.alpha_fixed_per_h;
        case AlphaPolicy::nominal: {
            double mean = 0.0;
            for (const TclUnit& u : fleet.units) mean += u.params.a_per_h();
            return mean / static_cast<double>(fleet.size());
        }
        case AlphaPolicy::optimal:
        default:
            return optimal_alpha_numeric(fleet).alpha_star_per_h;
    }
}

RegulationTrace make_signal(const Scenario& sc, const BatteryParams& phi_s) {
    switch (sc.signal_source) {
        case SignalSource::none: {
            RegulationTrace zero;
            zero.sample_period_s = sc.sample_period_s;
            zero.r_kw.assign(sc.horizon_samples, 0.0);
            return zero;
        }
        case SignalSource::file: {
            RegulationTrace trace = read_signal_csv(sc.signal_file);
            if (std::fabs(trace.sample_period_s - sc.sample_period_s) > 1e-9)
                throw ConfigError("signal sample period does not match the scenario");
            if (trace.size() < sc.horizon_samples)
                throw ConfigError("signal file shorter than the simulation horizon");
            trace.r_kw.resize(sc.horizon_samples);
            return trace;
        }
        case SignalSource::synthetic:
        default:
            break;
    }
    const double amplitude = sc.amplitude_frac_n_plus * phi_s.n_plus_kw;
    switch (sc.signal_kind) {
        case SignalKind::sinusoid:
            return sinusoid_signal(sc.horizon_samples, sc.sample_period_s, amplitude, sc.periods_s);
        case SignalKind::filtered_noise:
            return filtered_noise_signal(sc.horizon_samples, sc.sample_period_s, amplitude,
                                         sc.corr_time_s, sc.seed ^ 0xda3e39cb94b95bdbull);
        case SignalKind::ramp_dip:
        default: {
            RampDipSpec spec;
            spec.settle_s = sc.dip_settle_s;
            spec.down_rate_kw_per_s = sc.dip_down_rate_kw_per_s;
            spec.level_lo_kw = -sc.dip_lo_frac_n_minus * phi_s.n_minus_kw;
            spec.hold_s = sc.dip_hold_s;
            spec.up_rate_kw_per_s = sc.dip_up_rate_kw_per_s;
            spec.level_hi_kw = sc.dip_hi_frac_n_plus * phi_s.n_plus_kw;
            spec.crash_rate_kw_per_s = sc.dip_crash_rate_kw_per_s;
            return ramp_dip_signal(sc.horizon_samples, sc.sample_period_s, spec);
        }
    }
}

RegulationTrace read_signal_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open signal file " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty signal file");
    if (trim(line) != "t_s,r_kw") throw ConfigError("signal file must start with header t_s,r_kw");
    RegulationTrace trace;
    std::vector<double> times;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ConfigError("signal line " + std::to_string(lineno) + ": expected t_s,r_kw");
        times.push_back(to_double(trim(line.substr(0, comma)), "t_s"));
        trace.r_kw.push_back(to_double(trim(line.substr(comma + 1)), "r_kw"));
    }
    if (trace.r_kw.empty()) throw ConfigError("signal file has no samples");
    if (times.size() >= 2) {
        trace.sample_period_s = times[1] - times[0];
        for (std::size_t i = 1; i < times.size(); ++i) {
            if (std::fabs(times[i] - times[i - 1] - trace.sample_period_s) > 1e-9)
                throw ConfigError("signal samples are not uniformly spaced");
        }
    }
    return trace;
}

void write_signal_csv(std::ostream& out, const RegulationTrace& r) {
    out << "t_s,r_kw\n";
    for (std::size_t t = 0; t < r.size(); ++t)
        out << fmt(static_cast<double>(t) * r.sample_period_s, "%.17g") << ','
            << fmt(r.r_kw[t], "%.17g") << '\n';
}

void write_trace_csv(std::ostream& out, const SimulationTrace& trace) {
    out << "t_s,P_agg_kW,n_kW,delta_kW,P_on_avail_kW,P_off_avail_kW,"
           "P_lim_on_off_kW,P_lim_off_on_kW,mu_plus_kW,mu_minus_kW\n";
    for (const LedgerRow& row : trace.rows) {
        out << fmt(row.t_s, "%.10g") << ',' << fmt(row.p_agg_kw, "%.10g") << ','
            << fmt(trace.baseline_kw, "%.10g") << ',' << fmt(row.delta_kw, "%.10g") << ','
            << fmt(row.p_on_avail_kw, "%.10g") << ',' << fmt(row.p_off_avail_kw, "%.10g") << ','
            << fmt(row.p_lim_on_off_kw, "%.10g") << ',' << fmt(row.p_lim_off_on_kw, "%.10g") << ','
            << fmt(row.mu_plus_kw, "%.10g") << ',' << fmt(row.mu_minus_kw, "%.10g") << '\n';
    }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "heterogeneity_level,config,capacity_kwh\n";
    for (const SweepRow& row : rows) {
        out << fmt(row.level, "%.10g") << ',' << row.config << "_sufficient,"
            << fmt(row.sufficient_kwh, "%.10g") << '\n';
        out << fmt(row.level, "%.10g") << ',' << row.config << "_necessary,"
            << fmt(row.necessary_kwh, "%.10g") << '\n';
    }
}

SimulateOutput cmd_simulate(const Scenario& sc,
                            const std::optional<std::filesystem::path>& out_dir) {
    SimulateOutput out;
    Fleet fleet = fleet_from_scenario(sc);
    const double alpha = scenario_alpha(sc, fleet);
    const SufficientModel phi_s = sufficient_params(fleet, alpha);
    out.signal = make_signal(sc, phi_s.params);

    PriorityStackController controller;
    const bool controlled = sc.signal_source != SignalSource::none;
    SimulationOptions options;
    options.noise_sigma_c_per_h = sc.noise_sigma_c_per_h;
    out.trace = simulate(fleet, sc.horizon_samples, controlled ? &controller : nullptr,
                         controlled ? &out.signal : nullptr, options);

    double min_p_m = fleet.units.front().params.p_m_kw;
    for (const TclUnit& u : fleet.units) min_p_m = std::min(min_p_m, u.params.p_m_kw);

    double sq_sum = 0.0;
    double max_err = 0.0;
    std::size_t mu_low = 0;
    for (const LedgerRow& row : out.trace.rows) {
        const double err = row.delta_kw - row.r_kw;
        sq_sum += err * err;
        max_err = std::max(max_err, std::fabs(err));
        if (row.mu_minus_kw < min_p_m) ++mu_low;
    }
    const double steps = static_cast<double>(out.trace.rows.size());
    const double rms = std::sqrt(sq_sum / steps);
    out.metrics = nlohmann::json{
        {"baseline_kw", out.trace.baseline_kw},
        {"n_plus_kw", phi_s.params.n_plus_kw},
        {"alpha_per_h", alpha},
        {"rms_error_kw", rms},
        {"rms_error_frac_n_plus", rms / phi_s.params.n_plus_kw},
        {"max_abs_error_kw", max_err},
        {"short_cycle_incidents", out.trace.forced_short_cycle_incidents},
        {"mu_minus_threshold_kw", min_p_m},
        {"frac_steps_mu_minus_below_threshold", static_cast<double>(mu_low) / steps},
    };

    if (out_dir) {
        std::filesystem::create_directories(*out_dir);
        std::ofstream trace_file(*out_dir / "trace.csv");
        write_trace_csv(trace_file, out.trace);
        std::ofstream signal_file(*out_dir / "signal.csv");
        write_signal_csv(signal_file, out.signal);
        std::ofstream metrics_file(*out_dir / "metrics.json");
        metrics_file << out.metrics.dump(2) << '\n';
    }
    return out;
}

nlohmann::json cmd_battery(const Scenario& sc) {
    const Fleet fleet = fleet_from_scenario(sc);
    const double alpha = scenario_alpha(sc, fleet);
    const SufficientModel suff = sufficient_params(fleet, alpha);
    return nlohmann::json{{"alpha_per_h", alpha},
                          {"necessary", necessary_params(fleet, alpha)},
                          {"sufficient", suff.params},
                          {"beta", suff.beta}};
}

nlohmann::json dissipation_to_json(const DissipationResult& res) {
    const char* method = res.method == DissipationMethod::numeric ? "numeric"
                         : res.method == DissipationMethod::closed_form_C ? "closed_form_C"
                                                                          : "closed_form_delta";
    nlohmann::json j{{"alpha_star_per_h", res.alpha_star_per_h},
                     {"capacity_star_kwh", res.capacity_star_kwh},
                     {"method", method},
                     {"binding_unit", res.binding_unit}};
    if (!res.curve.empty()) {
        nlohmann::json curve = nlohmann::json::array();
        for (const auto& [alpha, value] : res.curve) curve.push_back({alpha, value});
        j["objective_curve"] = std::move(curve);
    }
    return j;
}

nlohmann::json cmd_dissipation(const Scenario& sc, const std::string& method) {
    const Fleet fleet = fleet_from_scenario(sc);
    DissipationResult res;
    if (method == "numeric") {
        res = optimal_alpha_numeric(fleet, {}, /*with_curve=*/true);
    } else if (method == "closed") {
        const HeterogeneityFlags flags = heterogeneity_flags(fleet.units);
        res = flags.only_delta() && flags.delta ? optimal_alpha_delta_hetero(fleet)
                                                : optimal_alpha_C_hetero(fleet);
    } else if (method == "auto") {
        const HeterogeneityFlags flags = heterogeneity_flags(fleet.units);
        if (flags.only_c())
            res = optimal_alpha_C_hetero(fleet);
        else if (flags.only_delta())
            res = optimal_alpha_delta_hetero(fleet);
        else
            res = optimal_alpha_numeric(fleet, {}, /*with_curve=*/true);
    } else {
        throw ConfigError("dissipation method must be auto | numeric | closed");
    }
    return dissipation_to_json(res);
}

nlohmann::json cluster_to_json(const ClusterAssignment& assignment) {
    nlohmann::json clusters = nlohmann::json::array();
    for (const DissipationResult& res : assignment.clusters)
        clusters.push_back(dissipation_to_json(res));
    return nlohmann::json{{"m", assignment.sizes.size()},
                          {"order", assignment.order},
                          {"boundaries", assignment.boundaries},
                          {"sizes", assignment.sizes},
                          {"clusters", std::move(clusters)},
                          {"total_capacity_kwh", assignment.total_capacity_kwh}};
}

nlohmann::json cmd_cluster(const Scenario& sc, std::size_t m, const std::string& method) {
    const Fleet fleet = fleet_from_scenario(sc);
    if (m == 0) m = sc.clusters_m;
    ClusterAssignment assignment;
    if (method == "dp")
        assignment = optimal_clusters_dp(fleet, m);
    else if (method == "closed")
        assignment = optimal_clusters_uniform(fleet, m);
    else if (method == "auto")
        assignment = optimal_clusters_auto(fleet, m);
    else
        throw ConfigError("cluster method must be auto | dp | closed");
    return cluster_to_json(assignment);
}

std::vector<SweepRow> cmd_sweep(const Scenario& sc) {
    SweepSpec spec;
    auto fixed_value = [](const ParamDist& d, const char* name) {
        if (d.kind != DistKind::fixed)
            throw ConfigError(std::string("sweep requires a fixed distribution for ") + name);
        return d.lo;
    };
    spec.nominal.c_kwh_per_c = sc.hetero.c_kwh_per_c.kind == DistKind::fixed
                                   ? sc.hetero.c_kwh_per_c.lo
                                   : 0.5 * (sc.hetero.c_kwh_per_c.lo + sc.hetero.c_kwh_per_c.hi);
    spec.nominal.r_c_per_kw = fixed_value(sc.hetero.r_c_per_kw, "R");
    spec.nominal.p_m_kw = fixed_value(sc.hetero.p_m_kw, "P_m");
    spec.nominal.eta = fixed_value(sc.hetero.eta, "eta");
    spec.nominal.theta_r_c = fixed_value(sc.hetero.theta_r_c, "theta_r");
    spec.nominal.delta_c = fixed_value(sc.hetero.delta_c, "delta");
    spec.nominal.theta_a_c = sc.hetero.theta_a_c;
    spec.n = sc.n;
    spec.m = sc.sweep_m;
    if (sc.sweep_levels == 1) {
        spec.c_halfwidths.push_back(sc.sweep_c_halfwidth_max);
    } else {
        for (std::size_t i = 0; i < sc.sweep_levels; ++i)
            spec.c_halfwidths.push_back(sc.sweep_c_halfwidth_max * static_cast<double>(i) /
                                        static_cast<double>(sc.sweep_levels - 1));
    }
    return capacity_gap_sweep(spec);
}

nlohmann::json cmd_feasibility(const Scenario& sc, FeasibilityReport* out_report) {
    Fleet fleet = fleet_from_scenario(sc);
    if (sc.signal_source == SignalSource::none)
        throw ConfigError("feasibility screening needs a regulation signal");
    const double alpha = scenario_alpha(sc, fleet);
    const SufficientModel phi_s = sufficient_params(fleet, alpha);
    const RegulationTrace r = make_signal(sc, phi_s.params);
    const FeasibilityReport report = feasibility_screen(fleet, phi_s.params, r);
    if (out_report) *out_report = report;

    nlohmann::json j;
    if (report.battery) {
        j["battery"] = nlohmann::json{
            {"t", static_cast<double>(report.battery->sample) * sc.sample_period_s},
            {"bound", report.battery->bound}};
    } else {
        j["battery"] = "pass";
    }
    if (report.ramp) {
        j["ramp"] = nlohmann::json{
            {"t", static_cast<double>(report.ramp->sample) * sc.sample_period_s},
            {"mu", report.ramp->mu_kw},
            {"dr", report.ramp->dr_kw}};
    } else {
        j["ramp"] = "pass";
    }
    return j;
}

}  // namespace tclbat
