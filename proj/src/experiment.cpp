#include "swdrem/experiment.hpp"

#include "swdrem/estimator.hpp"
#include "swdrem/observer.hpp"
#include "swdrem/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace swdrem {

namespace {

constexpr double kDecompositionTol = 1e-4;
constexpr double kRegressionTol = 1e-4;
constexpr double kMixingTol = 1e-3;
constexpr double kMonotoneSlack = 1e-10;
constexpr double kSignFloor = 1e-8;
constexpr double kExcitationRelTol = 1e-3;
constexpr double kDefaultWindow = 20.0;

std::string subsystemSuffix(std::size_t i)
{
    return std::to_string(i + 1);
}

double maxOver(const std::vector<double>& v, std::size_t begin, std::size_t end)
{
    double best = 0.0;
    for (std::size_t r = begin; r < end && r < v.size(); ++r)
        best = std::max(best, v[r]);
    return best;
}

} // namespace

bool allPassed(const std::vector<CheckResult>& checks)
{
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::vector<std::pair<std::string, std::string>> traceMeta(const ExperimentConfig& cfg)
{
    return {
        {"plant", cfg.plant.name},
        {"mode", toString(cfg.mode)},
        {"config", cfg.echo.dump()},
    };
}

SimulationTrace simulate(const ExperimentConfig& cfg, const GridCallback& onGrid)
{
    const FilterBank bank = makeFilterBank(cfg.filterGains, cfg.plant);
    const DremEstimator estimator = makeEstimator(cfg.plant, cfg.gamma, cfg.thetaHat0);
    const ObserverState observer(cfg.observerGain, cfg.plant, cfg.xHat0);
    RunOptions options;
    options.meta = traceMeta(cfg);
    options.onGrid = onGrid;
    SimulationTrace trace = runSimulation(cfg.plant, bank, estimator, observer, cfg.step, cfg.noise, options);
    // Ideal runs carry the configured seed as well, so every header records it.
    trace.seed = cfg.seed;
    return trace;
}

std::vector<CheckResult> convergenceChecks(const SimulationTrace& trace, int subsystems, double ratio, double stateTol)
{
    std::vector<CheckResult> checks;
    for (int i = 0; i < subsystems; ++i) {
        const auto err = trace.column("theta_err_" + subsystemSuffix(static_cast<std::size_t>(i)));
        const double initial = err.front();
        const double final = err.back();
        const double rel = initial > 0.0 ? final / initial : (final == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
        checks.push_back({"theta_err_" + subsystemSuffix(static_cast<std::size_t>(i)) + " final/initial", rel <= ratio,
                          rel, ratio, "final " + std::to_string(final) + ", initial " + std::to_string(initial)});
    }
    const double xFinal = trace.column("x_err").back();
    checks.push_back({"x_err final", xFinal <= stateTol, xFinal, stateTol, ""});
    return checks;
}

std::vector<CheckResult> noDivergenceChecks(const SimulationTrace& trace, int subsystems, double factor)
{
    std::vector<std::string> names{"x_err"};
    for (int i = 0; i < subsystems; ++i)
        names.push_back("theta_err_" + subsystemSuffix(static_cast<std::size_t>(i)));
    const std::size_t rows = trace.rowCount();
    const std::size_t midBegin = rows * 2 / 5;
    const std::size_t midEnd = rows * 3 / 5;
    const std::size_t finalBegin = rows * 4 / 5;

    std::vector<CheckResult> checks;
    for (const auto& name : names) {
        const auto v = trace.column(name);
        const bool finite = std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
        const double mid = maxOver(v, midBegin, midEnd);
        const double fin = maxOver(v, finalBegin, rows);
        const double ratio = mid > 0.0 ? fin / mid : (fin == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
        checks.push_back({name + " final-20% max / middle-20% max", finite && ratio <= factor, ratio, factor,
                          "middle max " + std::to_string(mid) + ", final max " + std::to_string(fin)});
    }
    return checks;
}

std::vector<CheckResult> adaptationInvariantChecks(const SimulationTrace& trace, const PlantModel& model)
{
    const std::size_t m = model.paramDim();
    const auto s = static_cast<std::size_t>(model.subsystems());
    const std::size_t rows = trace.rowCount();
    const auto sigma = trace.column("sigma");

    bool frozen = true;
    double worstIncrease = 0.0;
    bool signKept = true;
    std::string frozenDetail;
    std::string signDetail;
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const auto col = trace.column("theta_" + subsystemSuffix(i) + "_" + std::to_string(j + 1));
            const double truth = model.trueParams[i][j];
            for (std::size_t r = 0; r + 1 < rows; ++r) {
                const double before = col[r] - truth;
                const double after = col[r + 1] - truth;
                if (static_cast<std::size_t>(sigma[r]) != i + 1 && col[r + 1] != col[r]) {
                    if (frozen)
                        frozenDetail = "theta_" + subsystemSuffix(i) + "_" + std::to_string(j + 1) + " moved at t = "
                                       + std::to_string(trace.at(r + 1, 0));
                    frozen = false;
                }
                worstIncrease = std::max(worstIncrease, std::abs(after) - std::abs(before));
                if (std::abs(before) > kSignFloor && std::abs(after) > kSignFloor && (before > 0.0) != (after > 0.0)) {
                    if (signKept)
                        signDetail = "theta_" + subsystemSuffix(i) + "_" + std::to_string(j + 1)
                                     + " changed sign at t = " + std::to_string(trace.at(r + 1, 0));
                    signKept = false;
                }
            }
        }
    }

    std::vector<CheckResult> checks;
    checks.push_back({"freeze while inactive", frozen, frozen ? 0.0 : 1.0, 0.0, frozenDetail});
    checks.push_back({"element-wise |theta_err| non-increasing", worstIncrease <= kMonotoneSlack, worstIncrease,
                      kMonotoneSlack, "largest single-step increase"});
    checks.push_back({"theta_err sign preserved", signKept, signKept ? 0.0 : 1.0, kSignFloor, signDetail});

    const double span = trace.at(rows - 1, 0) - trace.at(0, 0);
    for (std::size_t i = 0; i < s; ++i) {
        const auto online = trace.column("excitation_" + subsystemSuffix(i));
        bool nonDecreasing = true;
        for (std::size_t r = 0; r + 1 < rows; ++r)
            nonDecreasing = nonDecreasing && online[r + 1] >= online[r];
        checks.push_back({"excitation_" + subsystemSuffix(i) + " non-decreasing", nonDecreasing, 0.0, 0.0, ""});
        if (span > 0.0) {
            const auto report = peCheck(trace, span, 0.0, rows);
            const double quadrature = report.subsystems[i].integral;
            const double rel = std::abs(online.back() - quadrature) / std::max(std::abs(online.back()), 1e-300);
            checks.push_back({"excitation_" + subsystemSuffix(i) + " online vs trapezoid", rel <= kExcitationRelTol, rel,
                              kExcitationRelTol,
                              "online " + std::to_string(online.back()) + ", trapezoid " + std::to_string(quadrature)});
        }
    }
    return checks;
}

std::vector<CheckResult> runOracleSuite(const ExperimentConfig& input, SimulationTrace* traceOut)
{
    ExperimentConfig cfg = input;
    cfg.mode = RunMode::Verify;
    cfg.noise.reset();
    const PlantModel& model = cfg.plant;
    const std::size_t n = model.stateDim();
    const std::size_t m = model.paramDim();

    double decomposition = 0.0;
    double regression = 0.0;
    double mixing = 0.0;
    auto onGrid = [&](const GridView& g) {
        const DenseVector& theta = model.trueParams[static_cast<std::size_t>(g.sigma - 1)];
        DenseVector thetaBar(m + n);
        for (std::size_t j = 0; j < m; ++j)
            thetaBar[j] = theta[j];
        for (std::size_t j = 0; j < n; ++j)
            thetaBar[m + j] = g.switchState[j];

        // Observer-gain unit: x = phi x(t_k) + xu + upsilon theta*
        const FilterUnit& single = g.units.back();
        const DenseVector w = g.x - single.phi * g.switchState - single.xu - single.upsilon * theta;
        decomposition = std::max(decomposition, norm2(w));

        for (std::size_t j = 0; j < n + m; ++j) {
            const auto row = regressorRow(g.units[j], g.measuredOutput, model);
            regression = std::max(regression, std::abs(row.z - dot(row.nu, thetaBar)));
        }
        const DenseVector dbar = residualDbar(g.mixed, thetaBar);
        double worst = 0.0;
        for (double v : dbar.values())
            worst = std::max(worst, std::abs(v));
        mixing = std::max(mixing, worst / std::max(1.0, std::abs(g.mixed.delta)));
    };

    const SimulationTrace trace = simulate(cfg, onGrid);
    std::vector<CheckResult> checks;
    checks.push_back({"decomposition identity x = phi x(t_k) + xu + upsilon theta*", decomposition <= kDecompositionTol,
                      decomposition, kDecompositionTol, "max over grid of the residual norm"});
    checks.push_back({"regression rows z_j = nu_j' theta_bar", regression <= kRegressionTol, regression, kRegressionTol,
                      "max over grid and rows"});
    checks.push_back({"mixing zbar = delta theta_bar", mixing <= kMixingTol, mixing, kMixingTol,
                      "max |zbar - delta theta_bar| / max(1, |delta|)"});
    const auto invariants = adaptationInvariantChecks(trace, model);
    checks.insert(checks.end(), invariants.begin(), invariants.end());
    if (traceOut)
        *traceOut = trace;
    return checks;
}

nlohmann::json summarize(const SimulationTrace& trace, const ExperimentConfig& cfg, const std::vector<CheckResult>& checks)
{
    using nlohmann::json;
    const auto s = static_cast<std::size_t>(cfg.plant.subsystems());
    const std::size_t rows = trace.rowCount();
    json out;
    out["plant"] = cfg.plant.name;
    out["mode"] = toString(cfg.mode);
    out["seed"] = trace.seed;
    out["rows"] = rows;
    out["end_time"] = trace.at(rows - 1, 0);
    out["switches"] = trace.resetTimes.empty() ? 0 : trace.resetTimes.size() - 1;

    json initial = json::array();
    json final = json::array();
    for (std::size_t i = 0; i < s; ++i) {
        const auto err = trace.column("theta_err_" + subsystemSuffix(i));
        initial.push_back(err.front());
        final.push_back(err.back());
    }
    out["theta_err_initial"] = initial;
    out["theta_err_final"] = final;
    out["x_err_initial"] = trace.column("x_err").front();
    out["x_err_final"] = trace.column("x_err").back();

    const auto delta = trace.column("delta");
    out["delta_min"] = *std::min_element(delta.begin(), delta.end());
    out["delta_max"] = *std::max_element(delta.begin(), delta.end());

    json excitation = json::array();
    for (std::size_t i = 0; i < s; ++i)
        excitation.push_back(trace.column("excitation_" + subsystemSuffix(i)).back());
    out["excitation_final"] = excitation;

    const double span = trace.at(rows - 1, 0) - trace.at(0, 0);
    if (span > 0.0) {
        const double window = std::min(kDefaultWindow, span);
        const auto report = peCheck(trace, window, 0.0, std::max<std::size_t>(1, rows / 2000));
        json pe;
        pe["window"] = window;
        json minMeans = json::array();
        for (const auto& sub : report.subsystems)
            minMeans.push_back(sub.minMean);
        pe["min_window_mean"] = minMeans;
        out["persistence_of_excitation"] = pe;
    }

    json list = json::array();
    for (const auto& c : checks)
        list.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"threshold", c.threshold},
                        {"detail", c.detail}});
    out["checks"] = list;
    out["passed"] = allPassed(checks);
    return out;
}

RunReport runPreset(const ExperimentConfig& cfg, bool writeArtifacts)
{
    RunReport report;
    const int s = cfg.plant.subsystems();
    if (cfg.mode == RunMode::Verify) {
        report.checks = runOracleSuite(cfg, &report.trace);
    } else {
        report.trace = simulate(cfg);
        const bool hasSpan = report.trace.rowCount() > 1;
        if (hasSpan) {
            report.checks = cfg.mode == RunMode::Ideal ? convergenceChecks(report.trace, s)
                                                       : noDivergenceChecks(report.trace, s);
        }
    }
    report.summary = summarize(report.trace, cfg, report.checks);
    report.exitCode = allPassed(report.checks) ? kExitOk : kExitCheckFailure;

    if (writeArtifacts) {
        std::filesystem::create_directories(cfg.outputDir);
        writeTrace(report.trace, cfg.outputDir / "trace.csv");
        std::ofstream summary(cfg.outputDir / "summary.json");
        if (!summary)
            throw TraceError("cannot write '" + (cfg.outputDir / "summary.json").string() + "'");
        summary << report.summary.dump(2) << "\n";
        renderPlots(report.trace, cfg.outputDir);
    }
    return report;
}

} // namespace swdrem
