// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "swdrem/config.hpp"
#include "swdrem/estimator.hpp"
#include "swdrem/experiment.hpp"
#include "swdrem/simulation.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

using namespace swdrem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

double secondsSince(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int id, const std::string& title, bool passed, const std::string& detail)
{
    std::printf("[%s] criterion %d: %s -- %s\n", passed ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!passed)
        ++failures;
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

const CheckResult* findCheck(const std::vector<CheckResult>& checks, const std::string& prefix)
{
    for (const auto& c : checks)
        if (c.name.rfind(prefix, 0) == 0)
            return &c;
    return nullptr;
}

void criterionMixing()
{
    const auto start = Clock::now();
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        DenseMatrix n(5, 5);
        for (double& v : n.values())
            v = dist(rng);
        const DenseMatrix nt = n.transposed();
        const DenseMatrix product = adjugate(nt) * nt - determinant(n) * DenseMatrix::identity(5);
        worst = std::max(worst, maxAbs(product));
    }
    const double elapsed = secondsSince(start);
    report(1, "mixing identity adj(N^T) N^T = det(N) I", worst <= 1e-9 && elapsed < 1.0,
           fmt("max abs entry %.3e (<= 1e-9), runtime %.3f s (< 1 s)", worst, elapsed));
}

void criteriaIdealRun(const ExperimentConfig& cfg)
{
    const auto start = Clock::now();
    SimulationTrace trace;
    const auto checks = runOracleSuite(cfg, &trace);
    const double elapsed = secondsSince(start);

    const CheckResult* decomposition = findCheck(checks, "decomposition identity");
    report(2, "decomposition x = phi x(t_k) + xu + upsilon theta*",
           decomposition && decomposition->passed && elapsed <= 30.0,
           fmt("max residual %.3e (<= 1e-4), runtime %.2f s (<= 30 s)", decomposition ? decomposition->value : NAN,
               elapsed));

    const CheckResult* regression = findCheck(checks, "regression rows");
    report(3, "regression rows z_j = nu_j' theta_bar", regression && regression->passed,
           fmt("max |z_j - nu_j' theta_bar| %.3e (<= 1e-4)", regression ? regression->value : NAN));

    const CheckResult* freeze = findCheck(checks, "freeze while inactive");
    const CheckResult* monotone = findCheck(checks, "element-wise |theta_err| non-increasing");
    const CheckResult* sign = findCheck(checks, "theta_err sign preserved");
    const bool decayOk = freeze && monotone && sign && freeze->passed && monotone->passed && sign->passed;
    report(4, "element-wise decay of |theta_err_ji|", decayOk,
           fmt("largest step increase %.3e (<= 1e-10)", monotone ? monotone->value : NAN)
               + ", frozen on inactive intervals: " + (freeze && freeze->passed ? "yes" : "no")
               + ", sign kept: " + (sign && sign->passed ? "yes" : "no"));
    if (freeze && !freeze->passed)
        std::printf("    %s\n", freeze->detail.c_str());
    if (sign && !sign->passed)
        std::printf("    %s\n", sign->detail.c_str());

    const int s = cfg.plant.subsystems();
    const auto convergence = convergenceChecks(trace, s);
    std::string detail;
    for (const auto& c : convergence)
        detail += c.name + " " + fmt("%.3e", c.value) + "; ";
    report(5, "convergence of parameter and state estimates", allPassed(convergence), detail);

    bool growth = true;
    std::string growthDetail;
    const std::size_t half = (trace.rowCount() - 1) / 2;
    for (int i = 1; i <= s; ++i) {
        const auto e = trace.column("excitation_" + std::to_string(i));
        const double gain = e.back() - e[half];
        growth = growth && gain > 0.0;
        growthDetail += "E" + std::to_string(i) + "(T)-E" + std::to_string(i) + "(T/2) " + fmt("%.3e", gain) + "; ";
    }
    bool quadrature = true;
    double worstRel = 0.0;
    for (const auto& c : checks) {
        if (c.name.find("online vs trapezoid") != std::string::npos) {
            quadrature = quadrature && c.passed;
            worstRel = std::max(worstRel, c.value);
        }
    }
    report(6, "excitation integrals grow and online matches trapezoid", growth && quadrature,
           growthDetail + fmt("worst relative mismatch %.3e (<= 1e-3)", worstRel));
}

void criterionScalarClosedForm()
{
    PlantModel model;
    model.name = "scalar";
    model.A = DenseMatrix{{-1.0}};
    model.B = DenseMatrix{{0.0}};
    model.C = DenseMatrix{{1.0}};
    model.psi = [](double y, double) { return DenseMatrix{{y}}; };
    model.trueParams = {DenseVector{0.6}};
    model.switchingRule = TimeScheduleRule{{{0.0, 1}}};
    model.initialState = DenseVector{1.0};

    const double gamma = 10.0;
    const double delta = 0.8;
    const double duration = 2.0;
    const double h = 1e-3;
    const double theta0 = -0.4;
    DremEstimator est = makeEstimator(model, {gamma}, {DenseVector{theta0}});
    const MixedSignals mixed{delta, DenseVector{delta * 0.6, 0.0}};

    const FlatDerivative f = [&](double, const DenseVector& flat) {
        est.thetaHat[0][0] = flat[0];
        return DenseVector{adaptationRate(est, mixed, 1)[0][0]};
    };
    HybridState state;
    state.flatState = DenseVector{theta0};
    const auto steps = static_cast<int>(std::lround(duration / h));
    for (int k = 0; k < steps; ++k)
        state = rk4Step(f, k * h, state, h);
    const double got = std::abs(state.flatState[0] - 0.6);
    const double want = std::exp(-gamma * delta * delta * duration) * std::abs(theta0 - 0.6);
    const double rel = std::abs(got - want) / want;
    report(7, "constant-Delta closed form |theta_err(T)| = exp(-gamma Delta^2 T)|theta_err(0)|", rel <= 1e-6,
           fmt("got %.10e, closed form %.10e, relative error %.3e (<= 1e-6)", got, want, rel));
}

std::string criterionRobust(std::string& canonical)
{
    const int s = 3;
    bool allOk = true;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        ExperimentConfig cfg = parseConfig(json{{"plant", "chua"}, {"mode", "robust"}, {"seed", seed}});
        const SimulationTrace trace = simulate(cfg);
        if (seed == 1)
            canonical = formatTrace(trace);
        const auto checks = noDivergenceChecks(trace, s);
        double worst = 0.0;
        std::string worstName;
        for (const auto& c : checks) {
            if (c.value > worst) {
                worst = c.value;
                worstName = c.name.substr(0, c.name.find(' '));
            }
        }
        const bool ok = allPassed(checks);
        allOk = allOk && ok;
        std::printf("    seed %2llu: %s worst ratio %.3f (%s)\n", static_cast<unsigned long long>(seed),
                    ok ? "ok  " : "FAIL", worst, worstName.c_str());
        for (const auto& c : checks)
            if (!c.passed)
                std::printf("             %s = %.3f (%s)\n", c.name.c_str(), c.value, c.detail.c_str());
    }

    json zero{{"plant", "chua"},
              {"mode", "robust"},
              {"noise", {{"v0", 0.0}, {"disturbance", {{"amplitudes", {0, 0, 0}}, {"frequencies", {7, 5, 13}}}}}}};
    const SimulationTrace degenerate = simulate(parseConfig(zero));
    const auto convergence = convergenceChecks(degenerate, s);
    std::printf("    zero noise: %s\n", allPassed(convergence) ? "reproduces the ideal convergence" : "FAIL");
    allOk = allOk && allPassed(convergence);
    detail = allOk ? "10 seeds bounded with final/middle maxima <= 1.5; zero-noise run converges"
                   : "see per-seed lines above";
    report(8, "robustness under disturbance and measurement noise", allOk, detail);
    return canonical;
}

} // namespace

int main()
{
    const auto suiteStart = Clock::now();
    const ExperimentConfig ideal = presetConfig("chua", RunMode::Ideal);

    criterionMixing();
    criteriaIdealRun(ideal);
    criterionScalarClosedForm();

    std::string canonical;
    criterionRobust(canonical);

    ExperimentConfig again = parseConfig(json{{"plant", "chua"}, {"mode", "robust"}, {"seed", 1}});
    const bool identical = formatTrace(simulate(again)) == canonical;
    const double total = secondsSince(suiteStart);
    report(9, "determinism and suite runtime", identical && total < 300.0,
           std::string("repeat of robust seed 1 ") + (identical ? "bit-identical" : "DIFFERS")
               + fmt(", suite runtime %.1f s (< 300 s)", total));

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
