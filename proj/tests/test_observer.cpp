#include "swdrem/config.hpp"
#include "swdrem/experiment.hpp"
#include "swdrem/observer.hpp"

#include <doctest.h>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <random>

using namespace swdrem;

TEST_CASE("observer with exact state and parameters tracks the plant")
{
    const PlantModel model = chuaPreset();
    DremEstimator est = makeEstimator(model, {10, 10, 10}, model.trueParams);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> dist(-3, 3);
    for (int trial = 0; trial < 100; ++trial) {
        const DenseVector x{dist(rng), dist(rng), dist(rng)};
        const int sigma = evaluateRule(model.switchingRule, 0.0, x[0]);
        ObserverState obs(chuaObserverGain(), model, x);
        const DenseVector a = observerDerivative(obs, model, est, model.output(x), 0.0, sigma);
        const DenseVector b = plantDerivative(model, x, 0.0, sigma);
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-13).scale(1.0));
    }
}

TEST_CASE("with exact parameters the error rate is (A - K C) times the error")
{
    const PlantModel model = chuaPreset();
    const DremEstimator est = makeEstimator(model, {10, 10, 10}, model.trueParams);
    const DenseMatrix closed = model.A - chuaObserverGain() * model.C;
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> dist(-3, 3);
    for (int trial = 0; trial < 100; ++trial) {
        const DenseVector x{dist(rng), dist(rng), dist(rng)};
        const DenseVector xHat{dist(rng), dist(rng), dist(rng)};
        const int sigma = evaluateRule(model.switchingRule, 0.0, x[0]);
        ObserverState obs(chuaObserverGain(), model, xHat);
        const DenseVector rate =
            observerDerivative(obs, model, est, model.output(x), 0.0, sigma) - plantDerivative(model, x, 0.0, sigma);
        const DenseVector expected = closed * (xHat - x);
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(rate[i] == doctest::Approx(expected[i]).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("state error decays as the closed-loop matrix exponential when parameters are exact")
{
    ExperimentConfig cfg = presetConfig("chua", RunMode::Ideal);
    cfg.thetaHat0 = cfg.plant.trueParams;
    cfg.step.endTime = 3.0;
    const SimulationTrace trace = simulate(cfg);

    const DenseMatrix closed = cfg.plant.A - cfg.observerGain * cfg.plant.C;
    Eigen::Matrix3d ak;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            ak(r, c) = closed(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    const Eigen::Vector3d e0(-2.88, 0.066, 2.12);

    for (std::size_t row : {std::size_t{1000}, std::size_t{2000}, std::size_t{3000}}) {
        const double t = trace.at(row, 0);
        const Eigen::Vector3d expected = (ak * t).exp() * e0;
        for (int k = 0; k < 3; ++k) {
            const std::string idx = std::to_string(k + 1);
            const double err = trace.at(row, trace.columnIndex("xhat" + idx)) - trace.at(row, trace.columnIndex("x" + idx));
            CHECK(err == doctest::Approx(expected(k)).epsilon(1e-8).scale(1e-3));
        }
    }
    const auto theta = trace.column("theta_err_1");
    CHECK(*std::max_element(theta.begin(), theta.end()) < 1e-10);
}

TEST_CASE("error metrics read the trace")
{
    ExperimentConfig cfg = presetConfig("chua", RunMode::Ideal);
    cfg.step.endTime = 0.5;
    const SimulationTrace trace = simulate(cfg);
    const ErrorMetrics metrics = errorMetrics(trace, cfg.plant);
    REQUIRE(metrics.time.size() == trace.rowCount());
    REQUIRE(metrics.paramError.size() == 3);
    const auto err2 = trace.column("theta_err_2");
    const auto xErr = trace.column("x_err");
    for (std::size_t r = 0; r < trace.rowCount(); r += 50) {
        CHECK(metrics.paramError[1][r] == doctest::Approx(err2[r]));
        CHECK(metrics.stateError[r] == doctest::Approx(xErr[r]));
        CHECK(metrics.active[0][r] == (trace.at(r, 1) == 1.0));
    }
    CHECK(metrics.paramError[0][0] == doctest::Approx(norm2(cfg.plant.trueParams[0])));

    SimulationTrace broken = trace;
    broken.columns[broken.columnIndex("xhat2")] = "renamed";
    CHECK_THROWS_AS((void)errorMetrics(broken, cfg.plant), TraceError);
}

TEST_CASE("observer gain must stabilise A - K C")
{
    const PlantModel model = chuaPreset();
    CHECK_THROWS_AS(ObserverState(DenseMatrix{{-12}, {0}, {0}}, model), ConfigError);
    CHECK_THROWS_AS(ObserverState(chuaObserverGain(), model, DenseVector(2)), DimensionError);
    const ObserverState obs(chuaObserverGain(), model);
    CHECK(obs.xHat == DenseVector(3));
}
