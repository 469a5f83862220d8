#pragma once

#include "swdrem/config.hpp"
#include "swdrem/simulation.hpp"
#include "swdrem/trace.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace swdrem {

/// Process exit codes of the command-line front end.
enum ExitCode : int
{
    kExitOk = 0,
    kExitCheckFailure = 1,
    kExitConfigError = 2,
    kExitRuntimeAbort = 3,
};

struct CheckResult
{
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

bool allPassed(const std::vector<CheckResult>& checks);

/// Builds filters, estimator and observer from `cfg` and runs it.
SimulationTrace simulate(const ExperimentConfig& cfg, const GridCallback& onGrid = {});

/// ||theta_err_i(T)|| <= ratio * ||theta_err_i(t0)|| for every i, and ||x_err(T)|| <= stateTol.
std::vector<CheckResult> convergenceChecks(const SimulationTrace& trace, int subsystems, double ratio = 0.05,
                                           double stateTol = 1e-2);

/// Max over the final 20% of the run <= factor * max over the middle 20% (40%..60%),
/// for ||x_err|| and every ||theta_err_i||; also requires all values finite.
std::vector<CheckResult> noDivergenceChecks(const SimulationTrace& trace, int subsystems, double factor = 1.5);

/// Trace-level invariants of the adaptation law: freeze while inactive,
/// element-wise non-increasing |theta_err_ji|, sign preservation,
/// non-decreasing excitation integrals, online vs trapezoidal excitation.
std::vector<CheckResult> adaptationInvariantChecks(const SimulationTrace& trace, const PlantModel& model);

/// Runs the ideal experiment with grid-level oracles (decomposition identity,
/// per-row regression residual, mixing identity) plus the trace invariants.
/// The ideal trace is stored in `traceOut` when given.
std::vector<CheckResult> runOracleSuite(const ExperimentConfig& cfg, SimulationTrace* traceOut = nullptr);

nlohmann::json summarize(const SimulationTrace& trace, const ExperimentConfig& cfg,
                         const std::vector<CheckResult>& checks);

struct RunReport
{
    SimulationTrace trace;
    std::vector<CheckResult> checks;
    nlohmann::json summary;
    int exitCode = kExitOk;
};

/// Runs `cfg` in its mode. When `writeArtifacts` is set, writes trace.csv,
/// summary.json and the SVG panels into cfg.outputDir.
RunReport runPreset(const ExperimentConfig& cfg, bool writeArtifacts = true);

/// Meta lines recorded in every trace header for `cfg`.
std::vector<std::pair<std::string, std::string>> traceMeta(const ExperimentConfig& cfg);

} // namespace swdrem
