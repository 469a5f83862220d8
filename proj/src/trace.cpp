#include "swdrem/trace.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace swdrem {

namespace {

constexpr std::string_view kSeedKey = "seed";
constexpr std::string_view kResetsKey = "resets";

void appendNumber(std::string& out, double v)
{
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    out.append(buf, res.ptr);
}

double parseNumber(std::string_view text, const std::string& origin, std::size_t line)
{
    double v = 0.0;
    const auto* begin = text.data();
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw TraceError(origin + ":" + std::to_string(line) + ": malformed number '" + std::string(text) + "'");
    return v;
}

std::vector<std::string_view> splitCommas(std::string_view text)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        parts.push_back(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return parts;
}

} // namespace

std::vector<std::string> traceColumns(std::size_t n, std::size_t m, std::size_t s)
{
    std::vector<std::string> cols{"t", "sigma"};
    for (std::size_t i = 1; i <= n; ++i)
        cols.push_back("x" + std::to_string(i));
    for (std::size_t i = 1; i <= n; ++i)
        cols.push_back("xhat" + std::to_string(i));
    cols.emplace_back("y");
    cols.emplace_back("ybar");
    for (std::size_t j = 1; j <= m + n; ++j)
        cols.push_back("z" + std::to_string(j));
    cols.emplace_back("delta");
    for (std::size_t i = 1; i <= s; ++i)
        for (std::size_t j = 1; j <= m; ++j)
            cols.push_back("theta_" + std::to_string(i) + "_" + std::to_string(j));
    for (std::size_t i = 1; i <= s; ++i)
        cols.push_back("theta_err_" + std::to_string(i));
    cols.emplace_back("x_err");
    for (std::size_t i = 1; i <= s; ++i)
        cols.push_back("excitation_" + std::to_string(i));
    return cols;
}

std::size_t SimulationTrace::columnIndex(const std::string& name) const
{
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end())
        throw TraceError("trace has no column '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
}

bool SimulationTrace::hasColumn(const std::string& name) const noexcept
{
    return std::find(columns.begin(), columns.end(), name) != columns.end();
}

std::vector<double> SimulationTrace::column(const std::string& name) const
{
    const std::size_t c = columnIndex(name);
    std::vector<double> out(rowCount());
    for (std::size_t r = 0; r < out.size(); ++r)
        out[r] = at(r, c);
    return out;
}

std::string SimulationTrace::metaValue(const std::string& key) const
{
    for (const auto& [k, v] : meta)
        if (k == key)
            return v;
    return {};
}

void SimulationTrace::appendRow(std::span<const double> values)
{
    if (values.size() != columns.size())
        throw TraceError("appendRow: expected " + std::to_string(columns.size()) + " values, got "
                         + std::to_string(values.size()));
    data.insert(data.end(), values.begin(), values.end());
}

std::string formatTrace(const SimulationTrace& trace)
{
    std::string out;
    out.reserve(trace.data.size() * 24 + 1024);
    for (const auto& [key, value] : trace.meta) {
        if (key.find(':') != std::string::npos || value.find('\n') != std::string::npos)
            throw TraceError("trace meta '" + key + "' cannot be serialised on one header line");
        out += "# " + key + ": " + value + "\n";
    }
    out += "# " + std::string(kSeedKey) + ": " + std::to_string(trace.seed) + "\n";
    out += "# " + std::string(kResetsKey) + ":";
    for (std::size_t i = 0; i < trace.resetTimes.size(); ++i) {
        out += (i == 0) ? " " : ",";
        appendNumber(out, trace.resetTimes[i]);
    }
    out += "\n";
    for (std::size_t c = 0; c < trace.columns.size(); ++c) {
        if (c > 0)
            out += ',';
        out += trace.columns[c];
    }
    out += "\n";
    const std::size_t width = trace.columns.size();
    for (std::size_t r = 0; r < trace.rowCount(); ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            if (c > 0)
                out += ',';
            appendNumber(out, trace.at(r, c));
        }
        out += "\n";
    }
    return out;
}

SimulationTrace parseTrace(const std::string& text, const std::string& origin)
{
    SimulationTrace trace;
    std::istringstream in(text);
    std::string line;
    std::size_t lineNo = 0;
    bool haveColumns = false;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line.rfind("# ", 0) == 0) {
            if (haveColumns)
                throw TraceError(origin + ":" + std::to_string(lineNo) + ": header line after column row");
            const auto colon = line.find(':');
            if (colon == std::string::npos)
                throw TraceError(origin + ":" + std::to_string(lineNo) + ": header line without ':'");
            std::string key = line.substr(2, colon - 2);
            std::string value = colon + 1 < line.size() && line[colon + 1] == ' ' ? line.substr(colon + 2)
                                                                                    : line.substr(colon + 1);
            if (key == kSeedKey) {
                std::uint64_t seed = 0;
                const auto res = std::from_chars(value.data(), value.data() + value.size(), seed);
                if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
                    throw TraceError(origin + ":" + std::to_string(lineNo) + ": malformed seed");
                trace.seed = seed;
            } else if (key == kResetsKey) {
                if (!value.empty())
                    for (auto part : splitCommas(value))
                        trace.resetTimes.push_back(parseNumber(part, origin, lineNo));
            } else {
                trace.meta.emplace_back(std::move(key), std::move(value));
            }
            continue;
        }
        if (!haveColumns) {
            for (auto part : splitCommas(line))
                trace.columns.emplace_back(part);
            haveColumns = true;
            continue;
        }
        const auto parts = splitCommas(line);
        if (parts.size() != trace.columns.size())
            throw TraceError(origin + ":" + std::to_string(lineNo) + ": expected " + std::to_string(trace.columns.size())
                             + " fields, got " + std::to_string(parts.size()));
        for (auto part : parts)
            trace.data.push_back(parseNumber(part, origin, lineNo));
    }
    if (!haveColumns)
        throw TraceError(origin + ": missing column header row");
    return trace;
}

void writeTrace(const SimulationTrace& trace, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw TraceError("cannot open '" + path.string() + "' for writing");
    const std::string text = formatTrace(trace);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out)
        throw TraceError("write to '" + path.string() + "' failed");
}

SimulationTrace readTrace(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw TraceError("cannot open '" + path.string() + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parseTrace(buffer.str(), path.string());
}

} // namespace swdrem
