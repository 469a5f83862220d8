#include "swdrem/simulation.hpp"

#include <algorithm>
#include <cmath>

namespace swdrem {

IntegrationError::IntegrationError(double time, std::size_t component, const std::string& what)
    : std::runtime_error(what)
    , time_(time)
    , component_(component)
{
}

std::size_t StepConfig::steps() const
{
    validate();
    const double span = (endTime - startTime) / stepSize;
    // Absorb representation error before rounding up (100 / 1e-3 is not exact).
    const double nearest = std::round(span);
    if (std::abs(span - nearest) <= 1e-9 * std::max(1.0, nearest))
        return static_cast<std::size_t>(nearest);
    return static_cast<std::size_t>(std::ceil(span));
}

void StepConfig::validate() const
{
    if (!(stepSize > 0.0) || !std::isfinite(stepSize))
        throw ConfigError("step_size: must be positive");
    if (!std::isfinite(startTime) || !std::isfinite(endTime) || endTime < startTime)
        throw ConfigError("end_time: must be finite and not before start_time");
    if (endTime > startTime && stepSize > endTime - startTime)
        throw ConfigError("step_size: must not exceed end_time - start_time");
}

std::string StateLayout::describe(std::size_t index) const
{
    auto matrixEntry = [](std::size_t local, std::size_t cols) {
        return "(" + std::to_string(local / cols) + "," + std::to_string(local % cols) + ")";
    };
    if (index < n)
        return "x[" + std::to_string(index) + "]";
    if (index < 2 * n)
        return "xhat[" + std::to_string(index - n) + "]";
    if (index < thetaHat(0)) {
        const std::size_t k = (index - unit(0)) / unitSize();
        std::size_t local = (index - unit(0)) % unitSize();
        const std::string prefix = "filter[" + std::to_string(k) + "].";
        if (local < n)
            return prefix + "xu[" + std::to_string(local) + "]";
        local -= n;
        if (local < n * m)
            return prefix + "upsilon" + matrixEntry(local, m);
        return prefix + "phi" + matrixEntry(local - n * m, n);
    }
    if (index < excitation(0)) {
        const std::size_t i = (index - thetaHat(0)) / m;
        return "theta_hat[" + std::to_string(i + 1) + "][" + std::to_string((index - thetaHat(0)) % m) + "]";
    }
    if (index < size())
        return "excitation[" + std::to_string(index - excitation(0) + 1) + "]";
    return "index " + std::to_string(index);
}

HybridState rk4Step(const FlatDerivative& derivative, double t, const HybridState& state, double h)
{
    const std::size_t dim = state.flatState.dim();
    auto evaluate = [&](double at, const DenseVector& y) {
        DenseVector k = derivative(at, y);
        if (k.dim() != dim)
            throw DimensionError("rk4Step: derivative returned length " + std::to_string(k.dim()) + ", expected "
                                 + std::to_string(dim));
        for (std::size_t i = 0; i < dim; ++i)
            if (!std::isfinite(k[i]))
                throw IntegrationError(at, i, "non-finite derivative at t = " + std::to_string(at));
        return k;
    };
    auto offset = [&](const DenseVector& k, double scale) {
        DenseVector y = state.flatState;
        for (std::size_t i = 0; i < dim; ++i)
            y[i] += scale * k[i];
        return y;
    };

    const DenseVector k1 = evaluate(t, state.flatState);
    const DenseVector k2 = evaluate(t + 0.5 * h, offset(k1, 0.5 * h));
    const DenseVector k3 = evaluate(t + 0.5 * h, offset(k2, 0.5 * h));
    const DenseVector k4 = evaluate(t + h, offset(k3, h));

    HybridState next = state;
    next.time = t + h;
    for (std::size_t i = 0; i < dim; ++i)
        next.flatState[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return next;
}

std::optional<int> detectSwitch(const SwitchingRule& rule, const HybridState& state, double output)
{
    const int next = evaluateRule(rule, state.time, output);
    if (next == state.activeSubsystem)
        return std::nullopt;
    return next;
}

namespace {

// Couples the module derivatives over the flat state. Scratch filter units and
// estimator/observer copies are reused between stages.
class CoupledSystem
{
public:
    CoupledSystem(const PlantModel& model, const FilterBank& bank, const DremEstimator& estim,
                  const ObserverState& obs, const NoiseSpec* noise)
        : model_(model)
        , noise_(noise)
        , units_(bank)
        , estimator_(estim)
        , observer_(obs)
    {
        units_.emplace_back(obs.gain(), model);
        layout_.n = model.stateDim();
        layout_.m = model.paramDim();
        layout_.s = static_cast<std::size_t>(model.subsystems());
        layout_.units = units_.size();
    }

    [[nodiscard]] const StateLayout& layout() const noexcept { return layout_; }

    DenseVector initialState() const
    {
        DenseVector flat(layout_.size());
        copyIn(flat, layout_.plant(), model_.initialState.values());
        copyIn(flat, layout_.observer(), observer_.xHat.values());
        for (std::size_t i = 0; i < layout_.s; ++i) {
            copyIn(flat, layout_.thetaHat(i), estimator_.thetaHat[i].values());
            flat[layout_.excitation(i)] = estimator_.excitationIntegrals[i];
        }
        resetFilterStates(flat);
        return flat;
    }

    void resetFilterStates(DenseVector& flat) const
    {
        for (std::size_t k = 0; k < layout_.units; ++k) {
            const std::size_t base = layout_.unit(k);
            std::fill_n(flat.values().begin() + static_cast<std::ptrdiff_t>(base), layout_.unitSize(), 0.0);
            const std::size_t phi = base + layout_.n + layout_.n * layout_.m;
            for (std::size_t i = 0; i < layout_.n; ++i)
                flat[phi + i * layout_.n + i] = 1.0;
        }
    }

    // Refreshes the scratch units / estimator / observer from a flat state.
    void unpack(const DenseVector& flat)
    {
        const auto src = flat.values();
        for (std::size_t k = 0; k < layout_.units; ++k) {
            auto& unit = units_[k];
            auto it = src.begin() + static_cast<std::ptrdiff_t>(layout_.unit(k));
            it = copyOut(it, unit.xu.values());
            it = copyOut(it, unit.upsilon.values());
            copyOut(it, unit.phi.values());
        }
        for (std::size_t i = 0; i < layout_.s; ++i) {
            copyOut(src.begin() + static_cast<std::ptrdiff_t>(layout_.thetaHat(i)), estimator_.thetaHat[i].values());
            estimator_.excitationIntegrals[i] = flat[layout_.excitation(i)];
        }
        copyOut(src.begin() + static_cast<std::ptrdiff_t>(layout_.observer()), observer_.xHat.values());
    }

    [[nodiscard]] DenseVector plantState(const DenseVector& flat) const
    {
        const auto begin = flat.values().begin() + static_cast<std::ptrdiff_t>(layout_.plant());
        return DenseVector(std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(layout_.n)));
    }

    [[nodiscard]] MixedSignals mixed(double measured) const
    {
        const auto drem = std::span<const FilterUnit>(units_).first(layout_.units - 1);
        return mix(stackRegressors(drem, measured, model_));
    }

    DenseVector derivative(double t, const DenseVector& flat, int sigma, double v)
    {
        unpack(flat);
        const DenseVector x = plantState(flat);
        const double y = model_.output(x);
        const double measured = y + v;
        const double u = model_.inputAt(t);

        DenseVector rate(layout_.size());
        copyIn(rate, layout_.plant(), plantDerivative(model_, x, t, sigma, noise_).values());
        copyIn(rate, layout_.observer(),
               observerDerivative(observer_, model_, estimator_, measured, u, sigma).values());
        for (std::size_t k = 0; k < layout_.units; ++k) {
            const FilterRates fr = filterDerivative(units_[k], model_, measured, u);
            std::size_t at = layout_.unit(k);
            copyIn(rate, at, fr.xu.values());
            at += layout_.n;
            copyIn(rate, at, fr.upsilon.values());
            at += layout_.n * layout_.m;
            copyIn(rate, at, fr.phi.values());
        }
        const MixedSignals mixedSignals = mixed(measured);
        const auto theta = adaptationRate(estimator_, mixedSignals, sigma);
        const auto excite = excitationRate(mixedSignals, sigma, static_cast<int>(layout_.s));
        for (std::size_t i = 0; i < layout_.s; ++i) {
            copyIn(rate, layout_.thetaHat(i), theta[i].values());
            rate[layout_.excitation(i)] = excite[i];
        }
        return rate;
    }

    [[nodiscard]] const std::vector<FilterUnit>& units() const noexcept { return units_; }
    [[nodiscard]] const DremEstimator& estimator() const noexcept { return estimator_; }
    [[nodiscard]] const ObserverState& observer() const noexcept { return observer_; }

private:
    static void copyIn(DenseVector& dst, std::size_t offset, std::span<const double> src)
    {
        std::copy(src.begin(), src.end(), dst.values().begin() + static_cast<std::ptrdiff_t>(offset));
    }

    template <class It>
    static It copyOut(It from, std::span<double> dst)
    {
        std::copy_n(from, dst.size(), dst.begin());
        return from + static_cast<std::ptrdiff_t>(dst.size());
    }

    const PlantModel& model_;
    const NoiseSpec* noise_;
    std::vector<FilterUnit> units_;
    DremEstimator estimator_;
    ObserverState observer_;
    StateLayout layout_;
};

} // namespace

SimulationTrace runSimulation(const PlantModel& model, const FilterBank& bank, const DremEstimator& estim,
                              const ObserverState& obs, const StepConfig& cfg, const std::optional<NoiseSpec>& noise,
                              const RunOptions& options)
{
    model.validate();
    cfg.validate();
    validateRule(model.switchingRule, model.subsystems(), cfg.startTime);
    const std::size_t n = model.stateDim();
    const std::size_t m = model.paramDim();
    const auto s = static_cast<std::size_t>(model.subsystems());
    if (bank.size() != n + m)
        throw ConfigError("runSimulation: need exactly m + n = " + std::to_string(n + m) + " filter units");
    for (std::size_t j = 0; j < bank.size(); ++j)
        if (!isHurwitz(bank[j].closedLoop()).hurwitz)
            throw ConfigError("filter_gains[" + std::to_string(j) + "]: A - K C is not Hurwitz");
    if (estim.subsystems() != model.subsystems() || estim.paramDim() != m || estim.gamma.size() != s)
        throw DimensionError("runSimulation: estimator does not match the plant");
    if (obs.xHat.dim() != n)
        throw DimensionError("runSimulation: observer does not match the plant");

    const NoiseSpec* noisePtr = noise ? &*noise : nullptr;
    CoupledSystem system(model, bank, estim, obs, noisePtr);
    const StateLayout& layout = system.layout();
    const std::size_t steps = cfg.steps();
    const double h = cfg.stepSize;

    SimulationTrace trace;
    trace.meta = options.meta;
    trace.seed = noise ? noise->seed : 0;
    trace.columns = traceColumns(n, m, s);
    trace.data.reserve((steps + 1) * trace.columns.size());

    auto noiseAt = [&](std::size_t stepIndex) { return noisePtr ? sampleNoise(*noisePtr, stepIndex) : 0.0; };

    HybridState state;
    state.time = cfg.startTime;
    state.flatState = system.initialState();
    state.lastSwitchTime = cfg.startTime;
    state.activeSubsystem = evaluateRule(model.switchingRule, state.time, model.output(model.initialState));
    DenseVector switchState = model.initialState;
    trace.resetTimes.push_back(cfg.startTime);

    std::vector<double> row(trace.columns.size());
    auto record = [&](std::size_t stepIndex, bool resetHere) {
        const DenseVector& flat = state.flatState;
        system.unpack(flat);
        const DenseVector x = system.plantState(flat);
        const double y = model.output(x);
        const double measured = y + noiseAt(stepIndex);
        const MixedSignals mixed = system.mixed(measured);
        const auto& units = system.units();

        std::size_t c = 0;
        row[c++] = state.time;
        row[c++] = state.activeSubsystem;
        for (std::size_t i = 0; i < n; ++i)
            row[c++] = x[i];
        for (std::size_t i = 0; i < n; ++i)
            row[c++] = flat[layout.observer() + i];
        row[c++] = y;
        row[c++] = measured;
        for (std::size_t j = 0; j < n + m; ++j)
            row[c++] = regressorRow(units[j], measured, model).z;
        row[c++] = mixed.delta;
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < m; ++j)
                row[c++] = flat[layout.thetaHat(i) + j];
        for (std::size_t i = 0; i < s; ++i)
            row[c++] = norm2(system.estimator().thetaHat[i] - model.trueParams[i]);
        row[c++] = norm2(system.observer().xHat - x);
        for (std::size_t i = 0; i < s; ++i)
            row[c++] = flat[layout.excitation(i)];
        trace.appendRow(row);

        if (options.onGrid) {
            GridView view;
            view.stepIndex = stepIndex;
            view.time = state.time;
            view.sigma = state.activeSubsystem;
            view.resetHere = resetHere;
            view.output = y;
            view.measuredOutput = measured;
            view.x = x;
            view.xHat = system.observer().xHat;
            view.switchState = switchState;
            view.units = units;
            view.thetaHat = system.estimator().thetaHat;
            view.excitation = system.estimator().excitationIntegrals;
            view.mixed = mixed;
            options.onGrid(view);
        }
    };

    record(0, true);

    for (std::size_t step = 0; step < steps; ++step) {
        const int sigma = state.activeSubsystem;
        const double v = noiseAt(step);
        const FlatDerivative f = [&](double t, const DenseVector& flat) { return system.derivative(t, flat, sigma, v); };
        try {
            state = rk4Step(f, state.time, state, h);
        } catch (const IntegrationError& e) {
            throw IntegrationError(e.time(), e.component(),
                                   "integration aborted at t = " + std::to_string(e.time()) + ": non-finite rate in "
                                       + layout.describe(e.component()));
        }
        // Grid times are anchored at t0 to avoid drift from repeated addition.
        state.time = cfg.startTime + static_cast<double>(step + 1) * h;

        bool resetHere = false;
        const DenseVector x = system.plantState(state.flatState);
        if (const auto next = detectSwitch(model.switchingRule, state, model.output(x))) {
            state.activeSubsystem = *next;
            state.lastSwitchTime = state.time;
            system.resetFilterStates(state.flatState);
            switchState = x;
            trace.resetTimes.push_back(state.time);
            resetHere = true;
        }
        record(step + 1, resetHere);
    }
    return trace;
}

} // namespace swdrem
