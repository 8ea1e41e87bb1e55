#pragma once

#include "hvroc/config.hpp"
#include "hvroc/mc_oracle.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace hvroc {

struct MetricsRow {
    std::string controller;
    char axis = 'x';
    double cov_mid = 0.0;
    double cov_end = 0.0;
    double mean_err_end = 0.0;
    std::optional<int> settling_t;
};

struct HumanSetup {
    PlantModel plant;
    CostSpec cost;
    LqsSolution solution;
    HumanBaseline baseline;
};

struct ControllerRun {
    std::string label;
    bool ok = false;
    std::string error;
    bool coupled = false;
    AutomationPolicy automation;
    MomentTrajectory trajectory;
    std::optional<OptimizationResult> optimization;
    MetricsRow rows[2];
};

HumanSetup setup_human(const ScenarioConfig& cfg);

MetricsRow metrics_row(const std::string& label, const MomentTrajectory& traj,
                       const Eigen::Vector2d& p_ref, int axis);

// Solves and propagates one controller; failures are captured in the result.
ControllerRun run_controller(const ScenarioConfig& cfg, const HumanSetup& human,
                             const std::string& label, std::uint64_t seed);

std::vector<ControllerRun> run_controllers(const ScenarioConfig& cfg, const HumanSetup& human,
                                           std::uint64_t seed);

// Shortest decimal representation that reads back to the same double.
std::string format_number(double v);

void write_metrics_csv(const std::string& path, const std::vector<ControllerRun>& runs);
void write_trajectory_csv(const std::string& path, const MomentTrajectory& traj);
void write_ensemble_csv(const std::string& path, const EnsembleStats& ens);
void print_table(std::ostream& os, const std::vector<ControllerRun>& runs, int N);

struct ReportResult {
    std::vector<ControllerRun> runs;
    bool all_ok = true;
};

ReportResult write_report(const std::vector<ControllerRun>& runs, const ScenarioConfig& cfg,
                          const std::string& out_dir, std::ostream& os);
ReportResult run_report(const ScenarioConfig& cfg, const std::string& out_dir,
                        std::uint64_t seed, std::ostream& os);

struct VerifyEntry {
    std::string label;
    bool ran = false;
    std::string error;
    OracleVerdict verdict;
};

struct VerifyResult {
    std::vector<VerifyEntry> entries;
    bool pass = true;
};

VerifyResult verify_runs(const std::vector<ControllerRun>& runs, const HumanSetup& human,
                         const ScenarioConfig& cfg, std::uint64_t seed,
                         const std::string& out_dir, std::ostream& os);
VerifyResult run_verify(const ScenarioConfig& cfg, const std::string& out_dir,
                        std::uint64_t seed, std::ostream& os);

} // namespace hvroc
