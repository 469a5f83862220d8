#include "swdrem/config.hpp"
#include "swdrem/experiment.hpp"
#include "swdrem/plot.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

using nlohmann::json;
using namespace swdrem;

namespace {

struct RunArgs
{
    std::string config;
    std::string preset;
    std::string mode;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<double> stepSize;
    std::optional<double> endTime;
};

json configDocument(const RunArgs& args, const std::string& forcedMode)
{
    json doc;
    if (!args.config.empty()) {
        std::ifstream in(args.config);
        if (!in)
            throw ConfigError(args.config + ": cannot open config file");
        try {
            doc = json::parse(in, nullptr, true, true);
        } catch (const json::parse_error& e) {
            throw ConfigError(args.config + ": " + e.what());
        }
        if (!doc.is_object())
            throw ConfigError(args.config + ": expected an object");
    } else {
        doc["plant"] = args.preset.empty() ? "chua" : args.preset;
    }
    if (!forcedMode.empty())
        doc["mode"] = forcedMode;
    else if (!args.mode.empty())
        doc["mode"] = args.mode;
    if (!args.out.empty())
        doc["output_dir"] = args.out;
    if (args.seed)
        doc["seed"] = *args.seed;
    if (args.stepSize)
        doc["step_size"] = *args.stepSize;
    if (args.endTime)
        doc["end_time"] = *args.endTime;
    return doc;
}

void addRunOptions(CLI::App* cmd, RunArgs& args, bool withMode)
{
    auto* config = cmd->add_option("--config", args.config, "JSON experiment file");
    auto* preset = cmd->add_option("--preset", args.preset, "built-in plant (chua)");
    config->excludes(preset);
    if (withMode)
        cmd->add_option("--mode", args.mode, "ideal | robust | verify");
    cmd->add_option("--out", args.out, "output directory");
    cmd->add_option("--seed", args.seed, "noise seed");
    cmd->add_option("--h", args.stepSize, "integration step");
    cmd->add_option("--T", args.endTime, "final time");
}

void printChecks(const std::vector<CheckResult>& checks)
{
    for (const auto& c : checks) {
        std::printf("%s  %-60s value %.3e  threshold %.3e", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.value,
                    c.threshold);
        if (!c.detail.empty())
            std::printf("  (%s)", c.detail.c_str());
        std::printf("\n");
    }
}

int runCommand(const RunArgs& args, const std::string& forcedMode)
{
    const ExperimentConfig cfg = parseConfig(configDocument(args, forcedMode));
    const RunReport report = runPreset(cfg, true);
    printChecks(report.checks);
    std::printf("wrote %s\n", cfg.outputDir.string().c_str());
    return report.exitCode;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Adaptive observer for switched systems with mixed-regressor parameter estimation"};
    app.set_help_flag("--help", "print this help message and exit");
    app.require_subcommand(1);

    RunArgs simArgs;
    auto* simulateCmd = app.add_subcommand("simulate", "run an experiment and write trace, summary and plots");
    addRunOptions(simulateCmd, simArgs, true);

    RunArgs verifyArgs;
    auto* verifyCmd = app.add_subcommand("verify", "run the oracle suite on an ideal experiment");
    addRunOptions(verifyCmd, verifyArgs, false);

    std::string tracePath;
    std::string plotOut = "out";
    auto* plotCmd = app.add_subcommand("plot", "render SVG panels from a trace CSV");
    plotCmd->add_option("--trace", tracePath, "trace CSV")->required();
    plotCmd->add_option("--out", plotOut, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (simulateCmd->parsed())
            return runCommand(simArgs, "");
        if (verifyCmd->parsed())
            return runCommand(verifyArgs, "verify");
        if (plotCmd->parsed()) {
            const SimulationTrace trace = readTrace(tracePath);
            for (const auto& path : renderPlots(trace, plotOut))
                std::printf("wrote %s\n", path.string().c_str());
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfigError;
    } catch (const TraceError& e) {
        std::fprintf(stderr, "trace error: %s\n", e.what());
        return kExitConfigError;
    } catch (const IntegrationError& e) {
        std::fprintf(stderr, "integration aborted: %s\n", e.what());
        return kExitRuntimeAbort;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntimeAbort;
    }
    return kExitOk;
}
