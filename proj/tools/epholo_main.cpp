// epholo -- scenario runner for holonomy, flatness, generator and metric
// experiments on the two-parameter non-Hermitian model family.
//
// Exit codes: 0 all checks passed, 2 some check failed, 3 invalid configuration,
// 4 numerical abort (EP clearance, step control, positivity, degeneracy).

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "epholo/scenario.hpp"

namespace {

using epholo::Scenario;
using epholo::ScenarioConfig;

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 2;
constexpr int kExitInvalidConfig = 3;
constexpr int kExitNumericalAbort = 4;

// Flat key=value configuration file; '#' starts a comment. Flags given on the
// command line take precedence over file values.
void load_config_file(const std::string& file, ScenarioConfig& cfg) {
    std::ifstream in(file);
    if (!in) throw epholo::InvalidConfig("cannot open config file " + file);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (eq == std::string::npos) {
            throw epholo::InvalidConfig("config file line " + std::to_string(lineno) +
                                        ": expected key=value");
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "scenario") {
                const auto s = epholo::scenario_from_string(value);
                if (!s) throw epholo::InvalidConfig("unknown scenario " + value);
                cfg.scenario = *s;
            } else if (key == "r") cfg.r = std::stod(value);
            else if (key == "rho") cfg.rho = std::stod(value);
            else if (key == "winding") cfg.winding = std::stoi(value);
            else if (key == "steps") cfg.steps = std::stoi(value);
            else if (key == "t") cfg.time_slice = std::stod(value);
            else if (key == "tol") cfg.tolerance = std::stod(value);
            else if (key == "out") cfg.output_dir = value;
            else if (key == "seed") cfg.seed = std::stoull(value);
            else if (key == "grid") cfg.grid = std::stoi(value);
            else if (key == "xmin") cfg.xmin = std::stod(value);
            else if (key == "xmax") cfg.xmax = std::stod(value);
            else if (key == "ymin") cfg.ymin = std::stod(value);
            else if (key == "ymax") cfg.ymax = std::stod(value);
            else throw epholo::InvalidConfig("unknown config key " + key);
        } catch (const std::invalid_argument&) {
            throw epholo::InvalidConfig("config file line " + std::to_string(lineno) +
                                        ": cannot parse value for " + key);
        }
    }
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stoi(item));
    }
    return out;
}

void print_summary(const epholo::RunSummary& summary) {
    std::cout << "scenario " << summary.scenario;
    if (summary.classification) {
        std::cout << ": classification " << epholo::to_string(summary.classification->label)
                  << " (distance " << summary.classification->distance << ")";
    }
    std::cout << "\n";
    for (const auto& c : summary.checks) {
        std::cout << "  [" << (c.pass ? "pass" : "FAIL") << "] " << c.name
                  << "  value=" << c.value << "  tol=" << c.tol << "\n";
    }
}

int classify_exit(const epholo::RunSummary& summary) {
    return summary.all_passed() ? kExitPass : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"holonomy and metric experiments around exceptional points"};
    app.require_subcommand(1);

    ScenarioConfig cfg;
    std::string scenario_name = "no-ep";
    std::string config_file;

    auto* run = app.add_subcommand("run", "run a single scenario");
    run->add_option("--scenario", scenario_name,
                    "one of no-ep, ep-minus, ep-plus, both-eps, winding, gate-cycle, "
                    "flatness-scan, k-check, metric-check");
    run->add_option("--config", config_file, "key=value config file (flags take precedence)");
    run->add_option("--r", cfg.r, "radius of origin-centered loops");
    run->add_option("--rho", cfg.rho, "radius of EP-centered loops");
    run->add_option("--winding", cfg.winding, "signed loop repetition count");
    run->add_option("--steps", cfg.steps, "RK4 steps per revolution");
    run->add_option("--t", cfg.time_slice, "time slice of the loop plane");
    run->add_option("--tol", cfg.tolerance, "primary check tolerance");
    run->add_option("--out", cfg.output_dir, "output directory");
    run->add_option("--seed", cfg.seed, "seed for sampled scans");
    run->add_option("--grid", cfg.grid, "flatness-scan grid size");
    run->add_option("--xmin", cfg.xmin, "scan bounds");
    run->add_option("--xmax", cfg.xmax, "scan bounds");
    run->add_option("--ymin", cfg.ymin, "scan bounds");
    run->add_option("--ymax", cfg.ymax, "scan bounds");

    std::string r_list, rho_list, steps_list, t_list, winding_list;
    auto* sweep_cmd = app.add_subcommand("sweep", "run a grid of scenario configurations");
    sweep_cmd->add_option("--scenario", scenario_name, "scenario to sweep");
    sweep_cmd->add_option("--r", r_list, "comma-separated r values");
    sweep_cmd->add_option("--rho", rho_list, "comma-separated rho values");
    sweep_cmd->add_option("--steps", steps_list, "comma-separated step counts");
    sweep_cmd->add_option("--t", t_list, "comma-separated time slices");
    sweep_cmd->add_option("--winding", winding_list, "comma-separated winding counts");
    sweep_cmd->add_option("--tol", cfg.tolerance, "primary check tolerance");
    sweep_cmd->add_option("--out", cfg.output_dir, "base output directory");
    sweep_cmd->add_option("--seed", cfg.seed, "seed for sampled scans");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalidConfig;
    }

    try {
        if (run->parsed()) {
            // Re-apply in precedence order: file first, then explicit flags.
            if (!config_file.empty()) {
                ScenarioConfig file_cfg;
                load_config_file(config_file, file_cfg);
                auto keep = [&](auto member, const char* flag) {
                    if (run->count(flag) == 0) cfg.*member = file_cfg.*member;
                };
                keep(&ScenarioConfig::r, "--r");
                keep(&ScenarioConfig::rho, "--rho");
                keep(&ScenarioConfig::winding, "--winding");
                keep(&ScenarioConfig::steps, "--steps");
                keep(&ScenarioConfig::time_slice, "--t");
                keep(&ScenarioConfig::tolerance, "--tol");
                keep(&ScenarioConfig::output_dir, "--out");
                keep(&ScenarioConfig::seed, "--seed");
                keep(&ScenarioConfig::grid, "--grid");
                keep(&ScenarioConfig::xmin, "--xmin");
                keep(&ScenarioConfig::xmax, "--xmax");
                keep(&ScenarioConfig::ymin, "--ymin");
                keep(&ScenarioConfig::ymax, "--ymax");
                if (run->count("--scenario") == 0) cfg.scenario = file_cfg.scenario;
            }
            if (run->count("--scenario") > 0) {
                const auto s = epholo::scenario_from_string(scenario_name);
                if (!s) throw epholo::InvalidConfig("unknown scenario " + scenario_name);
                cfg.scenario = *s;
            }
            const epholo::RunSummary summary = epholo::run_scenario(cfg);
            print_summary(summary);
            return classify_exit(summary);
        }

        // sweep
        const auto s = epholo::scenario_from_string(scenario_name);
        if (!s) throw epholo::InvalidConfig("unknown scenario " + scenario_name);
        cfg.scenario = *s;
        const std::vector<double> rs = r_list.empty() ? std::vector<double>{cfg.r}
                                                      : parse_double_list(r_list);
        const std::vector<double> rhos = rho_list.empty() ? std::vector<double>{cfg.rho}
                                                          : parse_double_list(rho_list);
        const std::vector<int> steps = steps_list.empty() ? std::vector<int>{cfg.steps}
                                                          : parse_int_list(steps_list);
        const std::vector<double> ts = t_list.empty() ? std::vector<double>{cfg.time_slice}
                                                      : parse_double_list(t_list);
        const std::vector<int> windings = winding_list.empty() ? std::vector<int>{cfg.winding}
                                                               : parse_int_list(winding_list);
        std::vector<ScenarioConfig> grid;
        for (double r : rs)
            for (double rho : rhos)
                for (int n : steps)
                    for (double t : ts)
                        for (int w : windings) {
                            ScenarioConfig c = cfg;
                            c.r = r;
                            c.rho = rho;
                            c.steps = n;
                            c.time_slice = t;
                            c.winding = w;
                            grid.push_back(c);
                        }
        const auto results = epholo::sweep(grid, cfg.output_dir);
        int exit_code = kExitPass;
        if (results.size() < grid.size()) exit_code = kExitNumericalAbort;
        for (const auto& summary : results) {
            print_summary(summary);
            if (!summary.all_passed()) exit_code = std::max(exit_code, kExitCheckFailed);
        }
        std::cout << "sweep: " << results.size() << "/" << grid.size() << " runs completed\n";
        return exit_code;
    } catch (const epholo::InvalidConfig& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return kExitInvalidConfig;
    } catch (const epholo::DomainViolation& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return kExitInvalidConfig;
    } catch (const epholo::Error& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return kExitNumericalAbort;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
