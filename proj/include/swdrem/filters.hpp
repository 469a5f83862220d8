#pragma once

#include "swdrem/linalg.hpp"
#include "swdrem/plant.hpp"

#include <span>
#include <vector>

namespace swdrem {

/// One auxiliary filter with gain K_j:
///   xu'      = (A - K_j C) xu + B u + K_j y
///   upsilon' = (A - K_j C) upsilon + Psi(y, u)
///   phi'     = (A - K_j C) phi
/// restarted at every reset instant with xu = 0, upsilon = 0, phi = I.
class FilterUnit
{
public:
    /// Throws ConfigError if A - gain*C is not Hurwitz.
    FilterUnit(DenseMatrix gain, const PlantModel& model);

    [[nodiscard]] const DenseMatrix& gain() const noexcept { return gain_; }
    /// A - K_j C, cached at construction.
    [[nodiscard]] const DenseMatrix& closedLoop() const noexcept { return closedLoop_; }

    DenseVector xu;
    DenseMatrix upsilon;
    DenseMatrix phi;

    void reset();

private:
    DenseMatrix gain_;
    DenseMatrix closedLoop_;
};

using FilterBank = std::vector<FilterUnit>;

struct FilterRates
{
    DenseVector xu;
    DenseMatrix upsilon;
    DenseMatrix phi;
};

/// `y` is whatever output feeds the filter (true y ideally, measured y otherwise);
/// Psi is evaluated at the same value.
FilterRates filterDerivative(const FilterUnit& unit, const PlantModel& model, double y, double u);

void resetFilters(std::span<FilterUnit> units);

struct RegressorRow
{
    double z = 0.0;
    DenseVector nu; ///< [C upsilon, C phi], length m + n
};

RegressorRow regressorRow(const FilterUnit& unit, double measuredOutput, const PlantModel& model);

struct RegressorStack
{
    DenseVector zf;
    DenseMatrix nMatrix; ///< row j is nu_j^T, i.e. this is N^T
};

/// Requires exactly m + n units.
RegressorStack stackRegressors(std::span<const FilterUnit> units, double measuredOutput, const PlantModel& model);

/// Builds one unit per gain, validating count (m + n) and Hurwitz-ness.
FilterBank makeFilterBank(const std::vector<DenseMatrix>& gains, const PlantModel& model);

} // namespace swdrem
