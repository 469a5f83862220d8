#include "swdrem/observer.hpp"

#include <cmath>

namespace swdrem {

ObserverState::ObserverState(DenseMatrix gain, const PlantModel& model, DenseVector initial)
    : xHat(std::move(initial))
    , gain_(std::move(gain))
{
    const std::size_t n = model.stateDim();
    if (gain_.rows() != n || gain_.cols() != 1)
        throw DimensionError("observer gain must be " + std::to_string(n) + " x 1");
    requireFinite(gain_, "observer gain");
    const auto stability = isHurwitz(model.A - gain_ * model.C);
    if (!stability.hurwitz)
        throw ConfigError(std::string("observer_gain: A - K C is not Hurwitz")
                          + (stability.indeterminate ? " (marginal/indeterminate Routh table)" : ""));
    if (xHat.dim() == 0)
        xHat = DenseVector(n);
    if (xHat.dim() != n)
        throw DimensionError("observer initial state must have length " + std::to_string(n));
    requireFinite(xHat, "observer initial state");
}

DenseVector observerDerivative(const ObserverState& obs, const PlantModel& model, const DremEstimator& est,
                               double measuredOutput, double u, int sigma)
{
    const std::size_t n = model.stateDim();
    if (obs.xHat.dim() != n)
        throw DimensionError("observerDerivative: observer state length mismatch");
    if (sigma < 1 || sigma > est.subsystems())
        throw DimensionError("observerDerivative: subsystem index out of range");
    const DenseVector& theta = est.thetaHat[static_cast<std::size_t>(sigma - 1)];
    if (theta.dim() != model.paramDim())
        throw DimensionError("observerDerivative: estimate length mismatch");

    const double innovation = measuredOutput - model.output(obs.xHat);
    const DenseMatrix psi = model.psi(measuredOutput, u);
    DenseVector rate = model.A * obs.xHat;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = model.B(i, 0) * u + obs.gain()(i, 0) * innovation;
        for (std::size_t j = 0; j < theta.dim(); ++j)
            acc += psi(i, j) * theta[j];
        rate[i] += acc;
    }
    return rate;
}

ErrorMetrics errorMetrics(const SimulationTrace& trace, const PlantModel& model)
{
    const std::size_t n = model.stateDim();
    const std::size_t m = model.paramDim();
    const auto s = static_cast<std::size_t>(model.subsystems());
    const std::size_t rows = trace.rowCount();

    std::vector<std::size_t> xCol(n);
    std::vector<std::size_t> xHatCol(n);
    for (std::size_t k = 0; k < n; ++k) {
        xCol[k] = trace.columnIndex("x" + std::to_string(k + 1));
        xHatCol[k] = trace.columnIndex("xhat" + std::to_string(k + 1));
    }
    std::vector<std::vector<std::size_t>> thetaCol(s, std::vector<std::size_t>(m));
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < m; ++j)
            thetaCol[i][j] = trace.columnIndex("theta_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
    const std::size_t tCol = trace.columnIndex("t");
    const std::size_t sigmaCol = trace.columnIndex("sigma");

    ErrorMetrics out;
    out.time.resize(rows);
    out.stateError.resize(rows);
    out.paramError.assign(s, std::vector<double>(rows));
    out.active.assign(s, std::vector<bool>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
        out.time[r] = trace.at(r, tCol);
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double e = trace.at(r, xHatCol[k]) - trace.at(r, xCol[k]);
            acc += e * e;
        }
        out.stateError[r] = std::sqrt(acc);
        const auto sigma = static_cast<std::size_t>(trace.at(r, sigmaCol));
        for (std::size_t i = 0; i < s; ++i) {
            double p = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                const double e = trace.at(r, thetaCol[i][j]) - model.trueParams[i][j];
                p += e * e;
            }
            out.paramError[i][r] = std::sqrt(p);
            out.active[i][r] = sigma == i + 1;
        }
    }
    return out;
}

} // namespace swdrem
