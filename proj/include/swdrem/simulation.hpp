#pragma once

#include "swdrem/estimator.hpp"
#include "swdrem/filters.hpp"
#include "swdrem/linalg.hpp"
#include "swdrem/observer.hpp"
#include "swdrem/plant.hpp"
#include "swdrem/trace.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace swdrem {

/// Non-finite derivative during an RK4 stage.
class IntegrationError : public std::runtime_error
{
public:
    IntegrationError(double time, std::size_t component, const std::string& what);

    [[nodiscard]] double time() const noexcept { return time_; }
    [[nodiscard]] std::size_t component() const noexcept { return component_; }

private:
    double time_;
    std::size_t component_;
};

struct StepConfig
{
    double stepSize = 1e-3;
    double endTime = 100.0;
    double startTime = 0.0;

    /// Number of grid steps; (T - t0) / h rounded up.
    [[nodiscard]] std::size_t steps() const;
    /// Throws ConfigError unless 0 < h and t0 <= T.
    void validate() const;
};

/// Fixed offsets of every component inside the flat integrator state:
///   [x | xhat | unit_0 ... unit_{U-1} | theta_hat_1 ... theta_hat_s | excitation_1 ... excitation_s]
/// with each unit stored as [xu (n) | upsilon (n*m, row-major) | phi (n*n, row-major)].
struct StateLayout
{
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t s = 0;
    std::size_t units = 0;

    [[nodiscard]] std::size_t unitSize() const noexcept { return n + n * m + n * n; }
    [[nodiscard]] std::size_t plant() const noexcept { return 0; }
    [[nodiscard]] std::size_t observer() const noexcept { return n; }
    [[nodiscard]] std::size_t unit(std::size_t k) const noexcept { return 2 * n + k * unitSize(); }
    [[nodiscard]] std::size_t thetaHat(std::size_t i) const noexcept { return unit(units) + i * m; }
    [[nodiscard]] std::size_t excitation(std::size_t i) const noexcept { return thetaHat(s) + i; }
    [[nodiscard]] std::size_t size() const noexcept { return excitation(s); }

    /// Human-readable name of a flat index, e.g. "filter[2].phi(1,0)".
    [[nodiscard]] std::string describe(std::size_t index) const;
};

struct HybridState
{
    double time = 0.0;
    DenseVector flatState;
    int activeSubsystem = 1;
    double lastSwitchTime = 0.0;
};

using FlatDerivative = std::function<DenseVector(double t, const DenseVector& state)>;

/// Classical RK4 step; the switching fields are carried through unchanged.
/// Throws IntegrationError on a non-finite stage derivative.
HybridState rk4Step(const FlatDerivative& derivative, double t, const HybridState& state, double h);

/// New subsystem index if `rule` disagrees with the active one at (state.time, output).
std::optional<int> detectSwitch(const SwitchingRule& rule, const HybridState& state, double output);

/// Snapshot handed to a grid observer after every recorded row (post-reset).
struct GridView
{
    std::size_t stepIndex = 0;
    double time = 0.0;
    int sigma = 1;
    bool resetHere = false;
    double output = 0.0;         ///< true y
    double measuredOutput = 0.0; ///< y + v
    DenseVector x;
    DenseVector xHat;
    DenseVector switchState;     ///< x(t_k) of the current interval
    std::vector<FilterUnit> units; ///< the m + n DREM units followed by the observer-gain unit
    std::vector<DenseVector> thetaHat;
    std::vector<double> excitation;
    MixedSignals mixed;
};

using GridCallback = std::function<void(const GridView&)>;

struct RunOptions
{
    std::vector<std::pair<std::string, std::string>> meta;
    GridCallback onGrid;
};

/// Integrates plant, filters (m + n units plus one unit carrying the observer
/// gain), estimator, observer and excitation accumulators on one RK4 grid.
/// Filters reset at t0 and at every detected switch; the row at a switching
/// instant holds post-reset values.
SimulationTrace runSimulation(const PlantModel& model, const FilterBank& bank, const DremEstimator& estim,
                              const ObserverState& obs, const StepConfig& cfg,
                              const std::optional<NoiseSpec>& noise = std::nullopt, const RunOptions& options = {});

} // namespace swdrem
