#include "swdrem/config.hpp"
#include "swdrem/experiment.hpp"
#include "swdrem/simulation.hpp"

#include <doctest.h>

#include <cmath>

using namespace swdrem;
using nlohmann::json;

namespace {

double rk4Exp(double lambda, double duration, double h)
{
    const FlatDerivative f = [lambda](double, const DenseVector& x) { return lambda * x; };
    HybridState s;
    s.flatState = DenseVector{1.0};
    const auto steps = static_cast<int>(std::lround(duration / h));
    for (int k = 0; k < steps; ++k)
        s = rk4Step(f, k * h, s, h);
    return s.flatState[0];
}

} // namespace

TEST_CASE("RK4 is fourth-order on the exponential")
{
    const double lambda = -1.3;
    const double e1 = std::abs(rk4Exp(lambda, 2.0, 0.1) - std::exp(lambda * 2.0));
    const double e2 = std::abs(rk4Exp(lambda, 2.0, 0.05) - std::exp(lambda * 2.0));
    CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.1));
    CHECK(std::abs(rk4Exp(lambda, 2.0, 1e-3) - std::exp(lambda * 2.0)) < 1e-13);
}

TEST_CASE("RK4 keeps the norm of a rotation")
{
    const FlatDerivative f = [](double, const DenseVector& x) { return DenseVector{x[1], -x[0]}; };
    HybridState s;
    s.flatState = DenseVector{1.0, 0.0};
    const double h = 1e-3;
    for (int k = 0; k < 10000; ++k)
        s = rk4Step(f, k * h, s, h);
    CHECK(std::abs(norm2(s.flatState) - 1.0) < 1e-9);
    CHECK(s.flatState[0] == doctest::Approx(std::cos(10.0)).epsilon(1e-9));
}

TEST_CASE("RK4 reports the first non-finite component")
{
    const FlatDerivative f = [](double, const DenseVector& x) { return DenseVector{x[0], std::nan("")}; };
    HybridState s;
    s.flatState = DenseVector{1.0, 1.0};
    try {
        (void)rk4Step(f, 0.25, s, 0.1);
        FAIL("expected IntegrationError");
    } catch (const IntegrationError& e) {
        CHECK(e.component() == 1);
        CHECK(e.time() == 0.25);
    }
}

TEST_CASE("step counts and validation")
{
    CHECK(StepConfig{1e-3, 1.0, 0.0}.steps() == 1000);
    CHECK(StepConfig{0.3, 1.0, 0.0}.steps() == 4);
    CHECK(StepConfig{0.1, 1.0, 1.0}.steps() == 0);
    CHECK_THROWS_AS(StepConfig({0.0, 1.0, 0.0}).validate(), ConfigError);
    CHECK_THROWS_AS(StepConfig({0.1, 1.0, 2.0}).validate(), ConfigError);
    CHECK_NOTHROW(StepConfig({0.1, 1.0, 1.0}).validate());
}

TEST_CASE("flat state layout")
{
    const StateLayout layout{3, 2, 3, 6};
    CHECK(layout.unitSize() == 18);
    CHECK(layout.observer() == 3);
    CHECK(layout.unit(0) == 6);
    CHECK(layout.thetaHat(0) == 6 + 6 * 18);
    CHECK(layout.excitation(0) == layout.thetaHat(0) + 6);
    CHECK(layout.size() == layout.excitation(0) + 3);
    CHECK(layout.describe(0) == "x[0]");
}

TEST_CASE("switch detection")
{
    const PlantModel model = chuaPreset();
    HybridState s;
    s.activeSubsystem = 2;
    CHECK_FALSE(detectSwitch(model.switchingRule, s, 0.5).has_value());
    CHECK(detectSwitch(model.switchingRule, s, 1.5) == 1);
    CHECK(detectSwitch(model.switchingRule, s, -1.0) == 3);
}

TEST_CASE("zero-length run produces a single initial row")
{
    ExperimentConfig cfg = presetConfig("chua", RunMode::Ideal);
    cfg.step.endTime = 0.0;
    const SimulationTrace trace = simulate(cfg);
    REQUIRE(trace.rowCount() == 1);
    CHECK(trace.resetTimes == std::vector<double>{0.0});
    CHECK(trace.at(0, trace.columnIndex("x1")) == 2.88);
    CHECK(trace.at(0, trace.columnIndex("sigma")) == 1.0);
    CHECK(trace.at(0, trace.columnIndex("delta")) == 0.0);
}

TEST_CASE("grid callback sees every row and the resets")
{
    ExperimentConfig cfg = presetConfig("chua", RunMode::Ideal);
    cfg.step.endTime = 8.0;
    std::size_t rows = 0;
    std::vector<double> resets;
    const SimulationTrace trace = simulate(cfg, [&](const GridView& g) {
        ++rows;
        if (g.resetHere)
            resets.push_back(g.time);
        CHECK(g.units.size() == 6);
        if (g.resetHere)
            CHECK(g.mixed.delta == 0.0);
    });
    CHECK(rows == trace.rowCount());
    CHECK(resets == trace.resetTimes);
    CHECK(trace.resetTimes.size() > 2);
}

TEST_CASE("a schedule with one subsystem leaves the others untouched")
{
    ExperimentConfig cfg = parseConfig(json{{"plant", "chua"}, {"end_time", 0.8}, {"schedule", {{{"start", 0.0}, {"subsystem", 2}}}}});
    const SimulationTrace trace = simulate(cfg);
    for (const char* name : {"theta_1_1", "theta_1_2", "theta_3_1", "theta_3_2"}) {
        const auto col = trace.column(name);
        CHECK(std::all_of(col.begin(), col.end(), [](double v) { return v == 0.0; }));
    }
    CHECK(trace.column("theta_2_1").back() != 0.0);
    CHECK(trace.resetTimes.size() == 1);
    const auto e1 = trace.column("excitation_1");
    CHECK(e1.back() == 0.0);
    CHECK(trace.column("excitation_2").back() > 0.0);
}

TEST_CASE("forcing the inner region on the Chua plant diverges and aborts the run")
{
    ExperimentConfig cfg = parseConfig(json{{"plant", "chua"}, {"end_time", 5.0}, {"schedule", {{{"start", 0.0}, {"subsystem", 2}}}}});
    CHECK_THROWS_AS((void)simulate(cfg), IntegrationError);
}

TEST_CASE("identical configuration and seed give identical traces")
{
    ExperimentConfig cfg = presetConfig("chua", RunMode::Robust);
    cfg.step.endTime = 4.0;
    const std::string a = formatTrace(simulate(cfg));
    const std::string b = formatTrace(simulate(cfg));
    CHECK(a == b);

    ExperimentConfig other = parseConfig(json{{"plant", "chua"}, {"mode", "robust"}, {"end_time", 4.0}, {"seed", 2}});
    CHECK(formatTrace(simulate(other)) != a);
}

TEST_CASE("start time offsets the grid")
{
    ExperimentConfig cfg = parseConfig(json{{"plant", "chua"}, {"start_time", 2.0}, {"end_time", 2.5}});
    const SimulationTrace trace = simulate(cfg);
    CHECK(trace.rowCount() == 501);
    CHECK(trace.at(0, 0) == 2.0);
    CHECK(trace.at(500, 0) == doctest::Approx(2.5));
    CHECK(trace.resetTimes.front() == 2.0);
}
