// scenario.hpp -- named experiment runner: maps scenario configurations to the
// library computations, evaluates per-scenario checks, and writes CSV traces
// plus JSON summaries with deterministic full-precision formatting.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "epholo/metric_geometry.hpp"
#include "epholo/transport.hpp"

namespace epholo {

enum class Scenario {
    no_ep,
    ep_minus,
    ep_plus,
    both_eps,
    winding,
    gate_cycle,
    flatness_scan,
    k_check,
    metric_check,
};

std::string to_string(Scenario s);
std::optional<Scenario> scenario_from_string(const std::string& name);

struct ScenarioConfig {
    Scenario scenario{Scenario::no_ep};
    double r{0.5};          // radius of origin-centered loops (both_eps: > 1)
    double rho{1.0};        // radius of EP-centered loops
    int winding{1};         // signed repetitions (winding scenario)
    int steps{20000};       // RK4 steps per revolution/segment
    double time_slice{0.0}; // t0 of the loop plane
    double tolerance{1e-6}; // primary check tolerance
    std::string output_dir{"out"};
    std::uint64_t seed{12345};  // RNG seed for sampled scans
    int grid{41};               // flatness-scan grid points per axis
    double xmin{-2.0}, xmax{2.0}, ymin{-2.0}, ymax{2.0};
};

// Throws InvalidConfig on violated parameter domains.
void validate(const ScenarioConfig& cfg);

// Stable hash of the canonical parameter string; keys sweep output directories.
std::string config_hash(const ScenarioConfig& cfg);

struct CheckResult {
    std::string name;
    bool pass{false};
    double value{0.0};
    double tol{0.0};
};

struct RunSummary {
    std::string scenario;
    ScenarioConfig params;
    std::optional<ComplexMat> holonomy;
    std::optional<HolonomyClass> classification;
    std::optional<double> max_lambda_dev;
    double est_error{0.0};
    double wall_time_s{0.0};
    std::vector<ComplexVec> gate_states;  // gate_cycle: state after each loop
    std::vector<CheckResult> checks;

    bool all_passed() const;
};

// Executes the configured scenario, writes its CSV trace and summary.json into
// cfg.output_dir, and returns the summary.
RunSummary run_scenario(const ScenarioConfig& cfg);

// Runs every configuration into <base_dir>/run-<hash>/, continuing past per-run
// failures, and writes <base_dir>/index.json afterwards.
std::vector<RunSummary> sweep(const std::vector<ScenarioConfig>& grid,
                              const std::string& base_dir);

struct FlatnessScan {
    int total{0};
    int admissible{0};
    int skipped{0};
    double max_residual{0.0};  // over admissible points; 0 when the scan is vacuous
};

// Curvature-identity residual scan over a parameter-space rectangle at fixed t,
// skipping points within ep_clearance of an exceptional point. Writes one CSV
// row per grid point.
FlatnessScan report_flatness(double xmin, double xmax, double ymin, double ymax, int grid,
                             double t, const std::string& csv_path, double ep_clearance = 1e-3);

// JSON (de)serialization of summaries; round-trips all values exactly.
std::string summary_to_json(const RunSummary& summary);
RunSummary summary_from_json(const std::string& text);

}  // namespace epholo
