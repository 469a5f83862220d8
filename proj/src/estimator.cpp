#include "swdrem/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace swdrem {

DremEstimator makeEstimator(const PlantModel& model, std::vector<double> gamma, std::vector<DenseVector> initial)
{
    const int s = model.subsystems();
    const std::size_t m = model.paramDim();
    if (gamma.size() != static_cast<std::size_t>(s))
        throw ConfigError("gamma: need one value per subsystem (" + std::to_string(s) + "), got "
                          + std::to_string(gamma.size()));
    for (std::size_t i = 0; i < gamma.size(); ++i)
        if (!(gamma[i] > 0.0) || !std::isfinite(gamma[i]))
            throw ConfigError("gamma[" + std::to_string(i) + "]: must be a positive finite number");

    if (initial.empty())
        initial.assign(static_cast<std::size_t>(s), DenseVector(m));
    if (initial.size() != static_cast<std::size_t>(s))
        throw ConfigError("theta_hat0: need one vector per subsystem");
    for (std::size_t i = 0; i < initial.size(); ++i) {
        if (initial[i].dim() != m)
            throw ConfigError("theta_hat0[" + std::to_string(i) + "]: must have length " + std::to_string(m));
        requireFinite(initial[i], "theta_hat0[" + std::to_string(i) + "]");
    }

    DremEstimator est;
    est.thetaHat = std::move(initial);
    est.gamma = std::move(gamma);
    est.numFilters = model.stateDim() + m;
    est.excitationIntegrals.assign(static_cast<std::size_t>(s), 0.0);
    return est;
}

MixedSignals mix(const RegressorStack& stack)
{
    if (!stack.nMatrix.isSquare() || stack.nMatrix.rows() != stack.zf.dim())
        throw DimensionError("mix: regressor stack is not square or does not match Z_f");
    // nMatrix holds N^T row by row, and det(N^T) = det(N).
    return {determinant(stack.nMatrix), adjugate(stack.nMatrix) * stack.zf};
}

std::vector<DenseVector> adaptationRate(const DremEstimator& est, const MixedSignals& mixed, int active)
{
    if (active < 1 || active > est.subsystems())
        throw DimensionError("adaptationRate: subsystem index out of range");
    const std::size_t m = est.paramDim();
    if (mixed.zbar.dim() < m)
        throw DimensionError("adaptationRate: mixed regression shorter than the parameter vector");
    std::vector<DenseVector> rates(est.thetaHat.size(), DenseVector(m));
    const auto i = static_cast<std::size_t>(active - 1);
    const double delta = mixed.delta;
    for (std::size_t j = 0; j < m; ++j)
        rates[i][j] = est.gamma[i] * delta * (mixed.zbar[j] - delta * est.thetaHat[i][j]);
    return rates;
}

std::vector<double> excitationRate(const MixedSignals& mixed, int active, int subsystems)
{
    if (active < 1 || active > subsystems)
        throw DimensionError("excitationRate: subsystem index out of range");
    std::vector<double> rates(static_cast<std::size_t>(subsystems), 0.0);
    rates[static_cast<std::size_t>(active - 1)] = mixed.delta * mixed.delta;
    return rates;
}

bool ExcitationReport::allPass() const noexcept
{
    return std::all_of(subsystems.begin(), subsystems.end(), [](const auto& s) { return s.passes; });
}

ExcitationReport peCheck(const SimulationTrace& trace, double windowLength, double alpha0, std::size_t stride)
{
    if (!(windowLength > 0.0))
        throw std::invalid_argument("peCheck: window length must be positive");
    if (stride == 0)
        stride = 1;
    const auto time = trace.column("t");
    const auto sigma = trace.column("sigma");
    const auto delta = trace.column("delta");
    if (time.size() < 2 || windowLength > time.back() - time.front())
        throw std::invalid_argument("peCheck: window length exceeds the trace span");

    int s = 0;
    while (trace.hasColumn("excitation_" + std::to_string(s + 1)))
        ++s;
    if (s == 0)
        for (double v : sigma)
            s = std::max(s, static_cast<int>(v));

    const std::size_t rows = time.size();
    std::vector<bool> resetRow(rows, false);
    for (double tk : trace.resetTimes) {
        const auto it = std::lower_bound(time.begin(), time.end(), tk - 1e-9 * std::max(1.0, std::abs(tk)));
        if (it != time.end() && std::abs(*it - tk) <= 1e-9 * std::max(1.0, std::abs(tk)))
            resetRow[static_cast<std::size_t>(it - time.begin())] = true;
    }
    ExcitationReport report;
    report.windowLength = windowLength;
    report.alpha0 = alpha0;
    report.subsystems.resize(static_cast<std::size_t>(s));

    for (int i = 1; i <= s; ++i) {
        auto& sub = report.subsystems[static_cast<std::size_t>(i - 1)];
        std::vector<double> prefix(rows, 0.0);
        for (std::size_t r = 0; r + 1 < rows; ++r) {
            const bool active = static_cast<int>(sigma[r]) == i;
            // rows at a switching instant hold post-reset values; use the left endpoint as the left limit
            const double right = resetRow[r + 1] ? delta[r] : delta[r + 1];
            const double area = active ? 0.5 * (time[r + 1] - time[r]) * (delta[r] * delta[r] + right * right) : 0.0;
            prefix[r + 1] = prefix[r] + area;
        }
        sub.integral = prefix.back();

        // prefix is piecewise linear in t between grid points by construction
        auto integralAt = [&](double t) {
            const auto it = std::lower_bound(time.begin(), time.end(), t);
            if (it == time.end())
                return prefix.back();
            const auto hi = static_cast<std::size_t>(it - time.begin());
            if (hi == 0 || *it == t)
                return prefix[hi];
            const std::size_t lo = hi - 1;
            const double frac = (t - time[lo]) / (time[hi] - time[lo]);
            return prefix[lo] + frac * (prefix[hi] - prefix[lo]);
        };

        sub.minMean = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < rows; r += stride) {
            const double end = time[r] + windowLength;
            if (end > time.back() * (1.0 + 1e-12) + 1e-12)
                break;
            const double mean = std::max(0.0, (integralAt(end) - prefix[r]) / windowLength);
            sub.windows.push_back({time[r], mean});
            sub.minMean = std::min(sub.minMean, mean);
        }
        sub.passes = !sub.windows.empty() && sub.minMean >= alpha0;
    }
    return report;
}

DenseVector residualDbar(const MixedSignals& mixed, const DenseVector& groundTruth)
{
    if (groundTruth.dim() != mixed.zbar.dim())
        throw DimensionError("residualDbar: ground truth length mismatch");
    return mixed.zbar - mixed.delta * groundTruth;
}

} // namespace swdrem
