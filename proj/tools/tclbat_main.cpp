// tclbat: simulate TCL fleets, abstract them as generalized batteries and
// dispatch them against a regulation signal.
//
// Exit codes: 0 ok, 2 feasibility violation found, 1 error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "tclbat/scenario.hpp"

namespace {

struct CommonArgs {
    std::string scenario_path;
    std::string out_dir;
    std::optional<long long> seed;
    std::string format = "json";
};

tclbat::Scenario load(const CommonArgs& args) {
    tclbat::Scenario sc = tclbat::load_scenario(args.scenario_path);
    if (args.seed) sc.seed = static_cast<std::uint64_t>(*args.seed);
    return sc;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool scenario_alias_fleet = false) {
    auto* opt = cmd->add_option("--scenario", args.scenario_path, "scenario file");
    if (scenario_alias_fleet) {
        cmd->add_option("--fleet", args.scenario_path, "scenario file (fleet section is used)")
            ->excludes(opt);
    } else {
        opt->required();
    }
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "override the scenario seed");
    cmd->add_option("--format", args.format, "stdout format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
    if (dir.empty()) return;
    std::filesystem::create_directories(dir);
    std::ofstream out(std::filesystem::path(dir) / name);
    out << content;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"TCL fleet aggregation: generalized battery models, optimal dissipation, "
                 "clustering and priority-stack dispatch"};
    app.require_subcommand(1);

    CommonArgs sim_args, bat_args, dis_args, clu_args, swp_args, fea_args;
    std::string dis_method = "auto", clu_method = "auto";
    std::size_t clu_m = 0;

    CLI::App* sim = app.add_subcommand("simulate", "run the scenario and write trace/metrics");
    add_common(sim, sim_args);

    CLI::App* bat = app.add_subcommand("battery", "necessary and sufficient battery parameters");
    add_common(bat, bat_args);

    CLI::App* dis = app.add_subcommand("dissipation", "optimal dissipation parameter");
    add_common(dis, dis_args, /*scenario_alias_fleet=*/true);
    dis->add_option("--method", dis_method, "auto | numeric | closed")
        ->check(CLI::IsMember({"auto", "numeric", "closed"}));

    CLI::App* clu = app.add_subcommand("cluster", "optimal clustering into m batteries");
    add_common(clu, clu_args, /*scenario_alias_fleet=*/true);
    clu->add_option("--m", clu_m, "number of clusters (default: scenario clusters_m)");
    clu->add_option("--method", clu_method, "auto | dp | closed")
        ->check(CLI::IsMember({"auto", "dp", "closed"}));

    CLI::App* swp = app.add_subcommand("sweep", "capacity-vs-heterogeneity sweep CSV");
    swp_args.format = "csv";
    add_common(swp, swp_args);

    CLI::App* fea = app.add_subcommand("feasibility", "screen the signal against battery and ramp bounds");
    add_common(fea, fea_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            const tclbat::Scenario sc = load(sim_args);
            std::optional<std::filesystem::path> out_dir;
            if (!sim_args.out_dir.empty()) out_dir = sim_args.out_dir;
            const tclbat::SimulateOutput out = tclbat::cmd_simulate(sc, out_dir);
            std::cout << out.metrics.dump(2) << '\n';
        } else if (bat->parsed()) {
            const auto j = tclbat::cmd_battery(load(bat_args));
            write_file(bat_args.out_dir, "battery.json", j.dump(2) + "\n");
            std::cout << j.dump(2) << '\n';
        } else if (dis->parsed()) {
            const auto j = tclbat::cmd_dissipation(load(dis_args), dis_method);
            write_file(dis_args.out_dir, "dissipation.json", j.dump(2) + "\n");
            std::cout << j.dump(2) << '\n';
        } else if (clu->parsed()) {
            const auto j = tclbat::cmd_cluster(load(clu_args), clu_m, clu_method);
            write_file(clu_args.out_dir, "cluster.json", j.dump(2) + "\n");
            std::cout << j.dump(2) << '\n';
        } else if (swp->parsed()) {
            const auto rows = tclbat::cmd_sweep(load(swp_args));
            std::ostringstream csv;
            tclbat::write_sweep_csv(csv, rows);
            write_file(swp_args.out_dir, "sweep.csv", csv.str());
            if (swp_args.format == "json") {
                nlohmann::json j = nlohmann::json::array();
                for (const auto& row : rows)
                    j.push_back({{"heterogeneity_level", row.level},
                                 {"config", row.config},
                                 {"sufficient_kwh", row.sufficient_kwh},
                                 {"necessary_kwh", row.necessary_kwh}});
                std::cout << j.dump(2) << '\n';
            } else {
                std::cout << csv.str();
            }
        } else if (fea->parsed()) {
            tclbat::FeasibilityReport report;
            const auto j = tclbat::cmd_feasibility(load(fea_args), &report);
            write_file(fea_args.out_dir, "feasibility.json", j.dump(2) + "\n");
            std::cout << j.dump(2) << '\n';
            if (!report.pass()) return 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
