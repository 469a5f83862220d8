#pragma once

#include "swdrem/linalg.hpp"
#include "swdrem/plant.hpp"
#include "swdrem/simulation.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace swdrem {

enum class RunMode
{
    Ideal,
    Robust,
    Verify,
};

std::string toString(RunMode mode);
RunMode parseRunMode(const std::string& text);

/// Fully resolved experiment: every default is filled in and every gain has
/// passed the Hurwitz check.
struct ExperimentConfig
{
    PlantModel plant;
    std::vector<DenseMatrix> filterGains;
    DenseMatrix observerGain;
    std::vector<double> gamma;
    std::vector<DenseVector> thetaHat0;
    DenseVector xHat0;
    StepConfig step;
    std::optional<NoiseSpec> noise;
    std::filesystem::path outputDir = "out";
    std::uint64_t seed = 1;
    RunMode mode = RunMode::Ideal;
    /// The input document with defaults applied; echoed into trace headers.
    nlohmann::json echo;
};

/// Parses and validates a config document. Errors are ConfigError with the
/// offending field path, e.g. "filter_gains[3]: A - K C is not Hurwitz".
ExperimentConfig parseConfig(const nlohmann::json& doc);
ExperimentConfig loadConfig(const std::filesystem::path& path);

/// `{"plant": name, "mode": mode}` resolved with all defaults.
ExperimentConfig presetConfig(const std::string& name, RunMode mode);

/// The documented gain set for the Chua preset (K1..K5) and observer gain K.
std::vector<DenseMatrix> chuaFilterGains();
DenseMatrix chuaObserverGain();

} // namespace swdrem
