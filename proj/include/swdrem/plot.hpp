#pragma once

#include "swdrem/trace.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace swdrem {

struct Series
{
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
};

struct Panel
{
    std::string title;
    std::string yLabel;
    std::vector<Series> series;
    bool logScale = false;
};

/// Deterministic SVG document for one panel. Long series are decimated to
/// per-pixel min/max pairs so spikes survive.
std::string renderSvg(const Panel& panel, int width = 900, int height = 320);

/// Panels derived from a trace: switching signal, excitation integrals,
/// parameter error norms (dashed while the subsystem is inactive), and each
/// state against its estimate. Traces whose `mode` meta is `robust` also get
/// state-error and log parameter-error panels.
std::vector<std::pair<std::string, Panel>> tracePanels(const SimulationTrace& trace);

/// Writes every panel of `tracePanels` as `<name>.svg` into `dir`; returns the paths.
std::vector<std::filesystem::path> renderPlots(const SimulationTrace& trace, const std::filesystem::path& dir);

} // namespace swdrem
