#include "swdrem/config.hpp"
#include "swdrem/experiment.hpp"
#include "swdrem/plot.hpp"
#include "swdrem/trace.hpp"

#include <doctest.h>

#include <filesystem>

using namespace swdrem;

TEST_CASE("standard column set")
{
    const auto cols = traceColumns(3, 2, 3);
    CHECK(cols.size() == 29);
    CHECK(cols.front() == "t");
    CHECK(cols[1] == "sigma");
    CHECK(cols[8] == "y");
    CHECK(cols[9] == "ybar");
    CHECK(cols[15] == "delta");
    CHECK(cols[16] == "theta_1_1");
    CHECK(cols[21] == "theta_3_2");
    CHECK(cols[25] == "x_err");
    CHECK(cols.back() == "excitation_3");
}

TEST_CASE("trace text round trip is exact")
{
    ExperimentConfig cfg = presetConfig("chua", RunMode::Robust);
    cfg.step.endTime = 6.0;
    const SimulationTrace trace = simulate(cfg);
    const std::string text = formatTrace(trace);
    const SimulationTrace back = parseTrace(text);
    CHECK(back == trace);
    CHECK(back.metaValue("mode") == "robust");
    CHECK(back.seed == 1);
    CHECK(formatTrace(back) == text);

    const auto dir = std::filesystem::temp_directory_path() / "swdrem_trace_test";
    std::filesystem::create_directories(dir);
    writeTrace(trace, dir / "t.csv");
    CHECK(readTrace(dir / "t.csv") == trace);
    std::filesystem::remove_all(dir);
}

TEST_CASE("malformed traces are rejected")
{
    CHECK_THROWS_AS((void)parseTrace(""), TraceError);
    CHECK_THROWS_AS((void)parseTrace("t,sigma\n0,1\n1\n"), TraceError);
    CHECK_THROWS_AS((void)parseTrace("t,sigma\n0,abc\n"), TraceError);
    CHECK_THROWS_AS((void)readTrace("/nonexistent/trace.csv"), TraceError);
    SimulationTrace t;
    t.columns = {"t"};
    CHECK_THROWS_AS((void)t.column("x"), TraceError);
    const double wrong[] = {1.0, 2.0};
    CHECK_THROWS_AS(t.appendRow(wrong), TraceError);
}

TEST_CASE("plots are a pure function of the trace")
{
    ExperimentConfig cfg = presetConfig("chua", RunMode::Robust);
    cfg.step.endTime = 3.0;
    const SimulationTrace trace = simulate(cfg);
    const auto panels = tracePanels(trace);
    std::vector<std::string> names;
    for (const auto& [name, panel] : panels)
        names.push_back(name);
    CHECK(names == std::vector<std::string>{"switching", "excitation", "theta_error", "state_1", "state_2", "state_3",
                                            "state_error", "theta_error_log"});
    for (const auto& [name, panel] : panels) {
        const std::string a = renderSvg(panel);
        CHECK(a == renderSvg(panel));
        CHECK(a.rfind("<svg", 0) == 0);
        CHECK(a.find("nan") == std::string::npos);
        CHECK(a.size() < 200000);
    }

    SimulationTrace ideal = trace;
    ideal.meta = {{"mode", "ideal"}};
    CHECK(tracePanels(ideal).size() == 6);
}

TEST_CASE("empty panel still renders")
{
    const std::string svg = renderSvg(Panel{"empty", "y", {}});
    CHECK(svg.find("</svg>") != std::string::npos);
}
