#include "swdrem/filters.hpp"

#include <algorithm>

namespace swdrem {

FilterUnit::FilterUnit(DenseMatrix gain, const PlantModel& model)
    : gain_(std::move(gain))
{
    const std::size_t n = model.stateDim();
    if (gain_.rows() != n || gain_.cols() != 1)
        throw DimensionError("filter gain must be " + std::to_string(n) + " x 1");
    requireFinite(gain_, "filter gain");
    closedLoop_ = model.A - gain_ * model.C;
    const auto stability = isHurwitz(closedLoop_);
    if (!stability.hurwitz)
        throw ConfigError(std::string("A - K C is not Hurwitz")
                          + (stability.indeterminate ? " (marginal/indeterminate Routh table)" : ""));
    xu = DenseVector(n);
    upsilon = DenseMatrix(n, model.paramDim());
    phi = DenseMatrix::identity(n);
}

void FilterUnit::reset()
{
    std::fill(xu.values().begin(), xu.values().end(), 0.0);
    std::fill(upsilon.values().begin(), upsilon.values().end(), 0.0);
    phi = DenseMatrix::identity(phi.rows());
}

FilterRates filterDerivative(const FilterUnit& unit, const PlantModel& model, double y, double u)
{
    const std::size_t n = model.stateDim();
    if (unit.xu.dim() != n || unit.upsilon.rows() != n || unit.upsilon.cols() != model.paramDim())
        throw DimensionError("filterDerivative: unit does not match the plant dimensions");
    const DenseMatrix& f = unit.closedLoop();

    FilterRates rates{f * unit.xu, f * unit.upsilon, f * unit.phi};
    for (std::size_t i = 0; i < n; ++i)
        rates.xu[i] += model.B(i, 0) * u + unit.gain()(i, 0) * y;
    rates.upsilon += model.psi(y, u);
    return rates;
}

void resetFilters(std::span<FilterUnit> units)
{
    for (auto& unit : units)
        unit.reset();
}

RegressorRow regressorRow(const FilterUnit& unit, double measuredOutput, const PlantModel& model)
{
    const std::size_t n = model.stateDim();
    const std::size_t m = model.paramDim();
    if (unit.xu.dim() != n || unit.upsilon.cols() != m)
        throw DimensionError("regressorRow: unit does not match the plant dimensions");
    RegressorRow row;
    row.z = measuredOutput - model.output(unit.xu);
    row.nu = DenseVector(m + n);
    const DenseMatrix cUpsilon = model.C * unit.upsilon;
    const DenseMatrix cPhi = model.C * unit.phi;
    for (std::size_t j = 0; j < m; ++j)
        row.nu[j] = cUpsilon(0, j);
    for (std::size_t j = 0; j < n; ++j)
        row.nu[m + j] = cPhi(0, j);
    return row;
}

RegressorStack stackRegressors(std::span<const FilterUnit> units, double measuredOutput, const PlantModel& model)
{
    const std::size_t width = model.stateDim() + model.paramDim();
    if (units.size() != width)
        throw ConfigError("stackRegressors: need exactly m + n = " + std::to_string(width) + " filter units, got "
                          + std::to_string(units.size()));
    RegressorStack stack{DenseVector(width), DenseMatrix(width, width)};
    for (std::size_t j = 0; j < width; ++j) {
        const auto row = regressorRow(units[j], measuredOutput, model);
        stack.zf[j] = row.z;
        for (std::size_t c = 0; c < width; ++c)
            stack.nMatrix(j, c) = row.nu[c];
    }
    return stack;
}

FilterBank makeFilterBank(const std::vector<DenseMatrix>& gains, const PlantModel& model)
{
    const std::size_t width = model.stateDim() + model.paramDim();
    if (gains.size() != width)
        throw ConfigError("filter_gains: need exactly m + n = " + std::to_string(width) + " gains, got "
                          + std::to_string(gains.size()));
    FilterBank bank;
    bank.reserve(width);
    for (std::size_t j = 0; j < gains.size(); ++j) {
        try {
            bank.emplace_back(gains[j], model);
        } catch (const ConfigError& e) {
            throw ConfigError("filter_gains[" + std::to_string(j) + "]: " + e.what());
        } catch (const DimensionError& e) {
            throw ConfigError("filter_gains[" + std::to_string(j) + "]: " + e.what());
        }
    }
    return bank;
}

} // namespace swdrem
