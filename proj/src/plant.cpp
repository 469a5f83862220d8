#include "swdrem/plant.hpp"

#include <algorithm>
#include <cmath>

namespace swdrem {

namespace {

constexpr double kChuaP = 10.0;
constexpr double kChuaQ = 16.0;
constexpr double kChuaR = 0.0385;

// splitmix64 finaliser, used only to decorrelate (seed, step) into a
// nonzero xorshift state.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept
{
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// xorshift64* (Vigna): shifts 12/25/27, multiplier 0x2545F4914F6CDD1D.
constexpr std::uint64_t xorshift64star(std::uint64_t& state) noexcept
{
    state ^= state >> 12;
    state ^= state << 25;
    state ^= state >> 27;
    return state * 0x2545F4914F6CDD1DULL;
}

} // namespace

bool OutputRegion::contains(double y) const noexcept
{
    const bool aboveLower = lowerInclusive ? y >= lower : y > lower;
    const bool belowUpper = upperInclusive ? y <= upper : y < upper;
    return aboveLower && belowUpper;
}

int evaluateRule(const SwitchingRule& rule, double t, double y)
{
    if (const auto* regions = std::get_if<StateRegionRule>(&rule)) {
        for (const auto& region : regions->regions)
            if (region.contains(y))
                return region.subsystem;
        throw ConfigError("switching rule: output " + std::to_string(y) + " lies in no region");
    }
    const auto& schedule = std::get<TimeScheduleRule>(rule);
    if (schedule.entries.empty() || t < schedule.entries.front().start)
        throw ConfigError("switching rule: time " + std::to_string(t) + " precedes the schedule");
    auto it = std::upper_bound(schedule.entries.begin(), schedule.entries.end(), t,
                               [](double value, const ScheduleEntry& e) { return value < e.start; });
    return std::prev(it)->subsystem;
}

void validateRule(const SwitchingRule& rule, int subsystems, double startTime)
{
    auto checkIndex = [subsystems](int idx, const std::string& where) {
        if (idx < 1 || idx > subsystems)
            throw ConfigError(where + ": subsystem " + std::to_string(idx) + " outside 1.."
                              + std::to_string(subsystems));
    };

    if (const auto* regions = std::get_if<StateRegionRule>(&rule)) {
        if (regions->regions.empty())
            throw ConfigError("regions: at least one region required");
        std::vector<double> probes;
        for (std::size_t i = 0; i < regions->regions.size(); ++i) {
            const auto& r = regions->regions[i];
            checkIndex(r.subsystem, "regions[" + std::to_string(i) + "]");
            for (double edge : {r.lower, r.upper})
                if (std::isfinite(edge))
                    probes.push_back(edge);
        }
        std::sort(probes.begin(), probes.end());
        probes.erase(std::unique(probes.begin(), probes.end()), probes.end());
        std::vector<double> points = {-std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
        for (std::size_t i = 0; i < probes.size(); ++i) {
            points.push_back(probes[i]);
            if (i + 1 < probes.size())
                points.push_back(0.5 * (probes[i] + probes[i + 1]));
        }
        if (!probes.empty()) {
            points.push_back(probes.front() - 1.0);
            points.push_back(probes.back() + 1.0);
        } else {
            points.push_back(0.0);
        }
        for (double y : points) {
            const bool covered = std::any_of(regions->regions.begin(), regions->regions.end(),
                                             [y](const OutputRegion& r) { return r.contains(y); });
            if (!covered)
                throw ConfigError("regions: output value " + std::to_string(y) + " is not covered");
        }
        return;
    }

    const auto& schedule = std::get<TimeScheduleRule>(rule);
    if (schedule.entries.empty())
        throw ConfigError("schedule: at least one entry required");
    if (schedule.entries.front().start > startTime)
        throw ConfigError("schedule[0].start: must not exceed the start time");
    for (std::size_t i = 0; i < schedule.entries.size(); ++i) {
        checkIndex(schedule.entries[i].subsystem, "schedule[" + std::to_string(i) + "]");
        if (i > 0 && !(schedule.entries[i].start > schedule.entries[i - 1].start))
            throw ConfigError("schedule[" + std::to_string(i) + "].start: start times must strictly increase");
    }
}

double PlantModel::output(const DenseVector& x) const
{
    if (x.dim() != C.cols())
        throw DimensionError("output: state dimension mismatch");
    double y = 0.0;
    for (std::size_t i = 0; i < x.dim(); ++i)
        y += C(0, i) * x[i];
    return y;
}

void PlantModel::validate() const
{
    const std::size_t n = A.rows();
    if (n == 0 || !A.isSquare())
        throw DimensionError("plant.A: must be square and non-empty");
    if (B.rows() != n || B.cols() != 1)
        throw DimensionError("plant.B: must be n x 1");
    if (C.rows() != 1 || C.cols() != n)
        throw DimensionError("plant.C: must be 1 x n");
    if (trueParams.empty())
        throw ConfigError("plant.params: at least one subsystem required");
    const std::size_t m = trueParams.front().dim();
    if (m == 0)
        throw DimensionError("plant.params: parameter dimension must be positive");
    for (std::size_t i = 0; i < trueParams.size(); ++i) {
        if (trueParams[i].dim() != m)
            throw DimensionError("plant.params[" + std::to_string(i) + "]: length differs from params[0]");
        requireFinite(trueParams[i], "plant.params[" + std::to_string(i) + "]");
    }
    if (n + m > kMaxKernelSide)
        throw DimensionError("plant: m + n must not exceed 8");
    if (!psi)
        throw ConfigError("plant.psi: missing");
    const DenseMatrix probe = psi(0.0, 0.0);
    if (probe.rows() != n || probe.cols() != m)
        throw DimensionError("plant.psi: must return an n x m matrix");
    if (initialState.dim() != n)
        throw DimensionError("plant.x0: must have length n");
    requireFinite(A, "plant.A");
    requireFinite(B, "plant.B");
    requireFinite(C, "plant.C");
    requireFinite(initialState, "plant.x0");
    // The schedule start is checked against the run start by the simulator.
    validateRule(switchingRule, subsystems(), std::numeric_limits<double>::infinity());
}

DenseVector plantDerivative(const PlantModel& model, const DenseVector& x, double t, int sigma, const NoiseSpec* noise)
{
    const std::size_t n = model.stateDim();
    if (x.dim() != n)
        throw DimensionError("plantDerivative: state has length " + std::to_string(x.dim()) + ", expected "
                             + std::to_string(n));
    if (sigma < 1 || sigma > model.subsystems())
        throw DimensionError("plantDerivative: subsystem index out of range");
    const double u = model.inputAt(t);
    const double y = model.output(x);
    DenseVector rate = model.A * x;
    const DenseMatrix psi = model.psi(y, u);
    const DenseVector& theta = model.trueParams[static_cast<std::size_t>(sigma - 1)];
    for (std::size_t i = 0; i < n; ++i) {
        double acc = model.B(i, 0) * u;
        for (std::size_t j = 0; j < theta.dim(); ++j)
            acc += psi(i, j) * theta[j];
        rate[i] += acc;
    }
    if (noise != nullptr && noise->disturbance)
        rate += noise->disturbance(t);
    return rate;
}

double sampleNoise(const NoiseSpec& spec, std::uint64_t stepIndex)
{
    if (spec.noiseBound == 0.0)
        return 0.0;
    std::uint64_t state = splitmix64(splitmix64(spec.seed) ^ stepIndex);
    if (state == 0)
        state = 0x9E3779B97F4A7C15ULL;
    const std::uint64_t bits = xorshift64star(state);
    const double unit = static_cast<double>(bits >> 11) * 0x1.0p-53;
    return spec.noiseBound * (2.0 * unit - 1.0);
}

DenseVector SinusoidalDisturbance::operator()(double t) const
{
    DenseVector w(amplitudes.size());
    for (std::size_t i = 0; i < amplitudes.size(); ++i)
        w[i] = amplitudes[i] * std::sin(frequencies[i] * t);
    return w;
}

double SinusoidalDisturbance::bound() const
{
    double acc = 0.0;
    for (double a : amplitudes)
        acc += a * a;
    return std::sqrt(acc);
}

DenseMatrix AffinePsi::operator()(double y, double u) const
{
    DenseMatrix out = constant;
    auto o = out.values();
    const auto cy = yCoeff.values();
    const auto cu = uCoeff.values();
    for (std::size_t i = 0; i < o.size(); ++i)
        o[i] += y * cy[i] + u * cu[i];
    return out;
}

PlantModel chuaPreset()
{
    PlantModel model;
    model.name = "chua";
    model.A = DenseMatrix{{-kChuaP, kChuaP, 0.0}, {1.0, -1.0, 1.0}, {0.0, -kChuaQ, -kChuaR}};
    model.B = DenseMatrix(3, 1);
    model.C = DenseMatrix{{1.0, 0.0, 0.0}};
    model.psi = AffinePsi{
        DenseMatrix{{0.0, -kChuaP}, {0.0, 0.0}, {0.0, 0.0}},
        DenseMatrix{{-kChuaP, 0.0}, {0.0, 0.0}, {0.0, 0.0}},
        DenseMatrix(3, 2),
    };
    model.trueParams = {
        DenseVector{-0.7143, -0.4286},
        DenseVector{-1.1429, 0.0},
        DenseVector{-0.7143, 0.4286},
    };
    const double inf = std::numeric_limits<double>::infinity();
    model.switchingRule = StateRegionRule{{
        {1.0, inf, true, false, 1},
        {-1.0, 1.0, false, false, 2},
        {-inf, -1.0, false, true, 3},
    }};
    model.initialState = DenseVector{2.88, -0.066, -2.12};
    return model;
}

NoiseSpec chuaNoisePreset(std::uint64_t seed)
{
    SinusoidalDisturbance w{{0.05, 0.005, 0.1}, {7.0, 5.0, 13.0}};
    NoiseSpec spec;
    spec.disturbanceBound = w.bound();
    spec.disturbance = w;
    spec.noiseBound = 0.1;
    spec.seed = seed;
    spec.lipschitzPsi = kChuaP;
    return spec;
}

} // namespace swdrem
