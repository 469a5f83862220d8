#pragma once

#include "swdrem/linalg.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace swdrem {

/// Invalid or inconsistent model/experiment configuration.
class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Interval of the output axis mapped to one subsystem (1-based index).
struct OutputRegion
{
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    bool lowerInclusive = false;
    bool upperInclusive = false;
    int subsystem = 1;

    [[nodiscard]] bool contains(double y) const noexcept;
};

/// Regions are tested in declaration order; the first match wins.
struct StateRegionRule
{
    std::vector<OutputRegion> regions;
};

struct ScheduleEntry
{
    double start = 0.0;
    int subsystem = 1;
};

/// Piecewise-constant schedule; entry k is active on [start_k, start_{k+1}).
struct TimeScheduleRule
{
    std::vector<ScheduleEntry> entries;
};

using SwitchingRule = std::variant<StateRegionRule, TimeScheduleRule>;

/// Active subsystem under `rule` at time t with output y. Throws ConfigError
/// if the rule is not total at that point.
int evaluateRule(const SwitchingRule& rule, double t, double y);

/// Checks the covering/ordering invariants of a rule against s subsystems.
void validateRule(const SwitchingRule& rule, int subsystems, double startTime);

using PsiFunction = std::function<DenseMatrix(double y, double u)>;
using InputSignal = std::function<double(double t)>;

/// x' = A x + B u + Psi(y, u) theta*_sigma,  y = C x.
struct PlantModel
{
    std::string name;
    DenseMatrix A;
    DenseMatrix B;
    DenseMatrix C;
    PsiFunction psi;
    std::vector<DenseVector> trueParams;
    SwitchingRule switchingRule;
    InputSignal input;
    DenseVector initialState;

    [[nodiscard]] std::size_t stateDim() const noexcept { return A.rows(); }
    [[nodiscard]] std::size_t paramDim() const noexcept { return trueParams.empty() ? 0 : trueParams.front().dim(); }
    [[nodiscard]] int subsystems() const noexcept { return static_cast<int>(trueParams.size()); }

    [[nodiscard]] double output(const DenseVector& x) const;
    [[nodiscard]] double inputAt(double t) const { return input ? input(t) : 0.0; }

    /// Throws DimensionError/ConfigError when the model's shapes disagree.
    void validate() const;
};

/// Additive state disturbance and bounded measurement noise.
struct NoiseSpec
{
    std::function<DenseVector(double t)> disturbance;
    double disturbanceBound = 0.0;
    double noiseBound = 0.0;
    std::uint64_t seed = 1;
    double lipschitzPsi = 0.0;
};

DenseVector plantDerivative(const PlantModel& model, const DenseVector& x, double t, int sigma,
                            const NoiseSpec* noise = nullptr);

/// Measurement noise for grid step `stepIndex`, uniform on [-v0, v0].
double sampleNoise(const NoiseSpec& spec, std::uint64_t stepIndex);

/// Chua-type double-scroll oscillator with a three-segment piecewise-linear
/// diode, written as a three-subsystem switched plant.
PlantModel chuaPreset();

/// Sinusoidal disturbance and v0 = 0.1 measurement noise used with the Chua preset.
NoiseSpec chuaNoisePreset(std::uint64_t seed);

/// w(t) = sum over components of amplitude_i * sin(frequency_i * t) e_i.
struct SinusoidalDisturbance
{
    std::vector<double> amplitudes;
    std::vector<double> frequencies;

    [[nodiscard]] DenseVector operator()(double t) const;
    [[nodiscard]] double bound() const;
};

/// Psi(y, u) = constant + y * yCoeff + u * uCoeff.
struct AffinePsi
{
    DenseMatrix constant;
    DenseMatrix yCoeff;
    DenseMatrix uCoeff;

    [[nodiscard]] DenseMatrix operator()(double y, double u) const;
};

} // namespace swdrem
