#include "swdrem/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace swdrem {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message)
{
    throw ConfigError(path + ": " + message);
}

double number(const json& j, const std::string& path)
{
    if (!j.is_number())
        fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v))
        fail(path, "must be finite");
    return v;
}

// Accepts the strings "inf"/"-inf" for unbounded region edges.
double edge(const json& j, const std::string& path)
{
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "+inf")
            return std::numeric_limits<double>::infinity();
        if (s == "-inf")
            return -std::numeric_limits<double>::infinity();
        fail(path, "expected a number, \"inf\" or \"-inf\"");
    }
    return number(j, path);
}

DenseVector vector(const json& j, const std::string& path, std::optional<std::size_t> length = std::nullopt)
{
    if (!j.is_array())
        fail(path, "expected an array of numbers");
    if (length && j.size() != *length)
        fail(path, "expected " + std::to_string(*length) + " entries, got " + std::to_string(j.size()));
    DenseVector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        v[i] = number(j[i], path + "[" + std::to_string(i) + "]");
    return v;
}

DenseMatrix matrix(const json& j, const std::string& path, std::optional<std::size_t> rows = std::nullopt,
                   std::optional<std::size_t> cols = std::nullopt)
{
    if (!j.is_array() || j.empty() || !j[0].is_array())
        fail(path, "expected a non-empty array of rows");
    const std::size_t r = j.size();
    const std::size_t c = j[0].size();
    if (rows && r != *rows)
        fail(path, "expected " + std::to_string(*rows) + " rows, got " + std::to_string(r));
    if (cols && c != *cols)
        fail(path, "expected " + std::to_string(*cols) + " columns, got " + std::to_string(c));
    DenseMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        const auto row = vector(j[i], path + "[" + std::to_string(i) + "]", c);
        for (std::size_t k = 0; k < c; ++k)
            m(i, k) = row[k];
    }
    return m;
}

void allowOnly(const json& obj, const std::string& path, const std::set<std::string>& keys)
{
    for (const auto& [key, _] : obj.items())
        if (!keys.contains(key))
            fail(path.empty() ? key : path + "." + key, "unknown field");
}

SwitchingRule parseRegions(const json& j, const std::string& path)
{
    if (!j.is_array())
        fail(path, "expected an array of regions");
    StateRegionRule rule;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        const auto& r = j[i];
        if (!r.is_object())
            fail(p, "expected an object");
        allowOnly(r, p, {"lower", "upper", "lower_inclusive", "upper_inclusive", "subsystem"});
        OutputRegion region;
        if (r.contains("lower"))
            region.lower = edge(r["lower"], p + ".lower");
        if (r.contains("upper"))
            region.upper = edge(r["upper"], p + ".upper");
        region.lowerInclusive = r.value("lower_inclusive", false);
        region.upperInclusive = r.value("upper_inclusive", false);
        if (!r.contains("subsystem") || !r["subsystem"].is_number_integer())
            fail(p + ".subsystem", "expected an integer");
        region.subsystem = r["subsystem"].get<int>();
        rule.regions.push_back(region);
    }
    return rule;
}

SwitchingRule parseSchedule(const json& j, const std::string& path)
{
    if (!j.is_array())
        fail(path, "expected an array of {start, subsystem} entries");
    TimeScheduleRule rule;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        const auto& e = j[i];
        if (!e.is_object())
            fail(p, "expected an object");
        allowOnly(e, p, {"start", "subsystem"});
        if (!e.contains("start"))
            fail(p + ".start", "missing");
        if (!e.contains("subsystem") || !e["subsystem"].is_number_integer())
            fail(p + ".subsystem", "expected an integer");
        rule.entries.push_back({number(e["start"], p + ".start"), e["subsystem"].get<int>()});
    }
    return rule;
}

PlantModel parsePlant(const json& j)
{
    if (j.is_string()) {
        const auto name = j.get<std::string>();
        if (name == "chua")
            return chuaPreset();
        fail("plant", "unknown preset '" + name + "' (available: chua)");
    }
    if (!j.is_object())
        fail("plant", "expected a preset name or an object");
    allowOnly(j, "plant", {"name", "A", "B", "C", "psi", "params", "regions", "schedule", "x0"});
    for (const char* key : {"A", "C", "psi", "params", "x0"})
        if (!j.contains(key))
            fail(std::string("plant.") + key, "missing");

    PlantModel model;
    model.name = j.value("name", "custom");
    model.A = matrix(j["A"], "plant.A");
    const std::size_t n = model.A.rows();
    if (model.A.cols() != n)
        fail("plant.A", "must be square");
    model.B = j.contains("B") ? DenseMatrix::column(vector(j["B"], "plant.B", n)) : DenseMatrix(n, 1);
    model.C = DenseMatrix::row(vector(j["C"], "plant.C", n));

    const auto& params = j["params"];
    if (!params.is_array() || params.empty())
        fail("plant.params", "expected a non-empty array of parameter vectors");
    const std::size_t m = params[0].is_array() ? params[0].size() : 0;
    if (m == 0)
        fail("plant.params[0]", "expected a non-empty array of numbers");
    for (std::size_t i = 0; i < params.size(); ++i)
        model.trueParams.push_back(vector(params[i], "plant.params[" + std::to_string(i) + "]", m));

    const auto& psi = j["psi"];
    if (!psi.is_object())
        fail("plant.psi", "expected an object with constant/y/u matrices");
    allowOnly(psi, "plant.psi", {"constant", "y", "u"});
    AffinePsi affine{DenseMatrix(n, m), DenseMatrix(n, m), DenseMatrix(n, m)};
    if (psi.contains("constant"))
        affine.constant = matrix(psi["constant"], "plant.psi.constant", n, m);
    if (psi.contains("y"))
        affine.yCoeff = matrix(psi["y"], "plant.psi.y", n, m);
    if (psi.contains("u"))
        affine.uCoeff = matrix(psi["u"], "plant.psi.u", n, m);
    model.psi = affine;

    if (j.contains("regions") == j.contains("schedule"))
        fail("plant", "exactly one of 'regions' or 'schedule' is required");
    model.switchingRule = j.contains("regions") ? parseRegions(j["regions"], "plant.regions")
                                                : parseSchedule(j["schedule"], "plant.schedule");
    model.initialState = vector(j["x0"], "plant.x0", n);

    try {
        model.validate();
    } catch (const DimensionError& e) {
        throw ConfigError(e.what());
    }
    return model;
}

std::optional<NoiseSpec> parseNoise(const json& doc, const PlantModel& plant, bool isChua, RunMode mode,
                                   std::uint64_t seed)
{
    if (mode != RunMode::Robust) {
        if (doc.contains("noise"))
            fail("noise", "only valid in robust mode");
        return std::nullopt;
    }
    if (!doc.contains("noise")) {
        if (isChua)
            return chuaNoisePreset(seed);
        fail("noise", "required in robust mode for custom plants");
    }
    const auto& j = doc["noise"];
    if (!j.is_object())
        fail("noise", "expected an object");
    allowOnly(j, "noise", {"v0", "disturbance", "lipschitz_psi"});
    NoiseSpec spec;
    spec.seed = seed;
    spec.noiseBound = j.contains("v0") ? number(j["v0"], "noise.v0") : 0.0;
    if (spec.noiseBound < 0.0)
        fail("noise.v0", "must be nonnegative");
    spec.lipschitzPsi = j.contains("lipschitz_psi") ? number(j["lipschitz_psi"], "noise.lipschitz_psi") : 0.0;
    if (spec.lipschitzPsi < 0.0)
        fail("noise.lipschitz_psi", "must be nonnegative");
    SinusoidalDisturbance w{std::vector<double>(plant.stateDim(), 0.0), std::vector<double>(plant.stateDim(), 0.0)};
    if (j.contains("disturbance")) {
        const auto& d = j["disturbance"];
        if (!d.is_object())
            fail("noise.disturbance", "expected an object with amplitudes/frequencies");
        allowOnly(d, "noise.disturbance", {"amplitudes", "frequencies"});
        for (const char* key : {"amplitudes", "frequencies"})
            if (!d.contains(key))
                fail(std::string("noise.disturbance.") + key, "missing");
        const auto amp = vector(d["amplitudes"], "noise.disturbance.amplitudes", plant.stateDim());
        const auto freq = vector(d["frequencies"], "noise.disturbance.frequencies", plant.stateDim());
        w.amplitudes.assign(amp.values().begin(), amp.values().end());
        w.frequencies.assign(freq.values().begin(), freq.values().end());
    }
    spec.disturbanceBound = w.bound();
    spec.disturbance = w;
    return spec;
}

} // namespace

std::string toString(RunMode mode)
{
    switch (mode) {
    case RunMode::Ideal:
        return "ideal";
    case RunMode::Robust:
        return "robust";
    case RunMode::Verify:
        return "verify";
    }
    return "ideal";
}

RunMode parseRunMode(const std::string& text)
{
    if (text == "ideal")
        return RunMode::Ideal;
    if (text == "robust")
        return RunMode::Robust;
    if (text == "verify")
        return RunMode::Verify;
    throw ConfigError("mode: expected ideal, robust or verify, got '" + text + "'");
}

std::vector<DenseMatrix> chuaFilterGains()
{
    return {
        DenseMatrix{{0.0}, {-1.0}, {-15.0}},
        DenseMatrix{{-2.0}, {2.5}, {20.0}},
        DenseMatrix{{-2.0}, {0.1}, {1.0}},
        DenseMatrix{{-0.4}, {-0.4}, {-8.0}},
        DenseMatrix{{-8.0}, {6.5}, {18.0}},
    };
}

DenseMatrix chuaObserverGain()
{
    return DenseMatrix{{-2.0}, {2.5}, {20.0}};
}

ExperimentConfig parseConfig(const json& doc)
{
    if (!doc.is_object())
        fail("<root>", "expected an object");
    allowOnly(doc, "",
              {"plant", "mode", "filter_gains", "observer_gain", "gamma", "theta_hat0", "xhat0", "step_size",
               "end_time", "start_time", "noise", "seed", "output_dir", "schedule"});
    if (!doc.contains("plant"))
        fail("plant", "missing");

    ExperimentConfig cfg;
    if (doc.contains("mode")) {
        if (!doc["mode"].is_string())
            fail("mode", "expected a string");
        cfg.mode = parseRunMode(doc["mode"].get<std::string>());
    }
    cfg.plant = parsePlant(doc["plant"]);
    const bool chua = doc["plant"].is_string();
    const std::size_t n = cfg.plant.stateDim();
    const std::size_t m = cfg.plant.paramDim();
    const auto s = static_cast<std::size_t>(cfg.plant.subsystems());

    if (doc.contains("schedule")) {
        cfg.plant.switchingRule = parseSchedule(doc["schedule"], "schedule");
    }

    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<long long>() >= 0))
            fail("seed", "expected a nonnegative integer");
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }

    if (doc.contains("filter_gains")) {
        const auto& gains = doc["filter_gains"];
        if (!gains.is_array())
            fail("filter_gains", "expected an array of gain vectors");
        for (std::size_t j = 0; j < gains.size(); ++j)
            cfg.filterGains.push_back(
                DenseMatrix::column(vector(gains[j], "filter_gains[" + std::to_string(j) + "]", n)));
    } else if (chua) {
        cfg.filterGains = chuaFilterGains();
    } else {
        fail("filter_gains", "missing (required for custom plants)");
    }
    if (cfg.filterGains.size() != n + m)
        fail("filter_gains", "need exactly m + n = " + std::to_string(n + m) + " gains (one per regression row), got "
                                 + std::to_string(cfg.filterGains.size()));
    for (std::size_t j = 0; j < cfg.filterGains.size(); ++j) {
        const auto stability = isHurwitz(cfg.plant.A - cfg.filterGains[j] * cfg.plant.C);
        if (!stability.hurwitz)
            fail("filter_gains[" + std::to_string(j) + "]",
                 std::string("A - K C is not Hurwitz") + (stability.indeterminate ? " (indeterminate)" : ""));
    }

    if (doc.contains("observer_gain"))
        cfg.observerGain = DenseMatrix::column(vector(doc["observer_gain"], "observer_gain", n));
    else if (chua)
        cfg.observerGain = chuaObserverGain();
    else
        fail("observer_gain", "missing (required for custom plants)");
    if (!isHurwitz(cfg.plant.A - cfg.observerGain * cfg.plant.C).hurwitz)
        fail("observer_gain", "A - K C is not Hurwitz");

    if (doc.contains("gamma")) {
        const auto& g = doc["gamma"];
        if (g.is_number()) {
            cfg.gamma.assign(s, number(g, "gamma"));
        } else {
            const auto v = vector(g, "gamma", s);
            cfg.gamma.assign(v.values().begin(), v.values().end());
        }
    } else {
        cfg.gamma.assign(s, 10.0);
    }
    for (std::size_t i = 0; i < s; ++i)
        if (!(cfg.gamma[i] > 0.0))
            fail("gamma[" + std::to_string(i) + "]", "must be positive");

    if (doc.contains("theta_hat0")) {
        const auto& th = doc["theta_hat0"];
        if (!th.is_array() || th.size() != s)
            fail("theta_hat0", "expected " + std::to_string(s) + " parameter vectors");
        for (std::size_t i = 0; i < s; ++i)
            cfg.thetaHat0.push_back(vector(th[i], "theta_hat0[" + std::to_string(i) + "]", m));
    } else {
        cfg.thetaHat0.assign(s, DenseVector(m));
    }
    cfg.xHat0 = doc.contains("xhat0") ? vector(doc["xhat0"], "xhat0", n) : DenseVector(n);

    if (doc.contains("step_size"))
        cfg.step.stepSize = number(doc["step_size"], "step_size");
    if (doc.contains("end_time"))
        cfg.step.endTime = number(doc["end_time"], "end_time");
    if (doc.contains("start_time"))
        cfg.step.startTime = number(doc["start_time"], "start_time");
    cfg.step.validate();
    validateRule(cfg.plant.switchingRule, cfg.plant.subsystems(), cfg.step.startTime);

    cfg.noise = parseNoise(doc, cfg.plant, chua, cfg.mode, cfg.seed);

    if (doc.contains("output_dir")) {
        if (!doc["output_dir"].is_string())
            fail("output_dir", "expected a string");
        cfg.outputDir = doc["output_dir"].get<std::string>();
    }

    cfg.echo = doc;
    cfg.echo["mode"] = toString(cfg.mode);
    cfg.echo["seed"] = cfg.seed;
    cfg.echo["step_size"] = cfg.step.stepSize;
    cfg.echo["end_time"] = cfg.step.endTime;
    cfg.echo["start_time"] = cfg.step.startTime;
    cfg.echo["gamma"] = cfg.gamma;
    return cfg;
}

ExperimentConfig loadConfig(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path.string() + ": cannot open config file");
    json doc;
    try {
        doc = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parseConfig(doc);
}

ExperimentConfig presetConfig(const std::string& name, RunMode mode)
{
    return parseConfig(json{{"plant", name}, {"mode", toString(mode)}});
}

} // namespace swdrem
