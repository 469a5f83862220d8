#pragma once

#include "swdrem/filters.hpp"
#include "swdrem/linalg.hpp"
#include "swdrem/plant.hpp"
#include "swdrem/trace.hpp"

#include <vector>

namespace swdrem {

/// Per-subsystem DREM parameter estimator. Only the first m entries of the
/// mixed regression are adapted; the entries belonging to the state at the
/// switching instant are never estimated.
struct DremEstimator
{
    std::vector<DenseVector> thetaHat;
    std::vector<double> gamma;
    std::size_t numFilters = 0;
    std::vector<double> excitationIntegrals;

    [[nodiscard]] int subsystems() const noexcept { return static_cast<int>(thetaHat.size()); }
    [[nodiscard]] std::size_t paramDim() const noexcept { return thetaHat.empty() ? 0 : thetaHat.front().dim(); }
};

/// Zero initial estimates unless `initial` is given; one gamma per subsystem.
DremEstimator makeEstimator(const PlantModel& model, std::vector<double> gamma,
                            std::vector<DenseVector> initial = {});

struct MixedSignals
{
    double delta = 0.0; ///< det(N)
    DenseVector zbar;   ///< adj(N^T) Z_f
};

MixedSignals mix(const RegressorStack& stack);

/// theta_hat_ji' = gamma_i chi_i delta (zbar_j - delta theta_hat_ji), j = 1..m.
std::vector<DenseVector> adaptationRate(const DremEstimator& est, const MixedSignals& mixed, int active);

/// rate_i = delta^2 for the active subsystem, 0 otherwise.
std::vector<double> excitationRate(const MixedSignals& mixed, int active, int subsystems);

struct PeWindow
{
    double start = 0.0;
    double mean = 0.0;
};

struct SubsystemExcitation
{
    double integral = 0.0; ///< trapezoidal integral of chi_i delta^2 over the trace
    std::vector<PeWindow> windows;
    double minMean = 0.0;
    bool passes = false; ///< every window mean >= alpha0
};

struct ExcitationReport
{
    double windowLength = 0.0;
    double alpha0 = 0.0;
    std::vector<SubsystemExcitation> subsystems;

    [[nodiscard]] bool allPass() const noexcept;
};

/// Sliding-window means (1/T0) * integral of chi_i delta^2 over [t, t + T0],
/// by trapezoidal quadrature on the trace grid. Over each grid step the
/// indicator is taken from the step's left row (the subsystem held during
/// the step). A row at a switching instant holds post-reset values, so the
/// step ending there uses its left endpoint twice. Windows start every `stride` rows.
ExcitationReport peCheck(const SimulationTrace& trace, double windowLength, double alpha0, std::size_t stride = 1);

/// zbar - delta * theta_bar; verification only (needs ground truth).
DenseVector residualDbar(const MixedSignals& mixed, const DenseVector& groundTruth);

} // namespace swdrem
