#pragma once

#include "swdrem/estimator.hpp"
#include "swdrem/linalg.hpp"
#include "swdrem/plant.hpp"
#include "swdrem/trace.hpp"

#include <vector>

namespace swdrem {

/// Adaptive Luenberger observer
///   xhat' = A xhat + B u + Psi(y, u) theta_hat_sigma + K (y - C xhat)
class ObserverState
{
public:
    /// Throws ConfigError if A - K C is not Hurwitz.
    ObserverState(DenseMatrix gain, const PlantModel& model, DenseVector initial = {});

    [[nodiscard]] const DenseMatrix& gain() const noexcept { return gain_; }

    DenseVector xHat;

private:
    DenseMatrix gain_;
};

DenseVector observerDerivative(const ObserverState& obs, const PlantModel& model, const DremEstimator& est,
                               double measuredOutput, double u, int sigma);

/// Per-row error norms recovered from a trace, plus the active flag of every
/// subsystem on each row.
struct ErrorMetrics
{
    std::vector<double> time;
    std::vector<double> stateError;                 ///< ||xhat - x||
    std::vector<std::vector<double>> paramError;    ///< [i][row] = ||theta_hat_i - theta*_i||
    std::vector<std::vector<bool>> active;          ///< [i][row]
};

/// Requires the x, xhat and theta columns; throws TraceError otherwise.
ErrorMetrics errorMetrics(const SimulationTrace& trace, const PlantModel& model);

} // namespace swdrem
