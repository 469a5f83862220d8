#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace swdrem {

class TraceError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Column names of the standard trace for a plant with n states, m parameters
/// per subsystem and s subsystems:
///   t, sigma, x1..xn, xhat1..xhatn, y, ybar, z1..z{m+n}, delta,
///   theta_i_j (i = 1..s, j = 1..m), theta_err_i, x_err, excitation_i
std::vector<std::string> traceColumns(std::size_t n, std::size_t m, std::size_t s);

/// Time-indexed record of a run. Rows are stored flat, row-major.
struct SimulationTrace
{
    std::vector<std::pair<std::string, std::string>> meta;
    std::uint64_t seed = 0;
    std::vector<double> resetTimes; ///< t_0 followed by every switching instant
    std::vector<std::string> columns;
    std::vector<double> data;

    [[nodiscard]] std::size_t rowCount() const noexcept { return columns.empty() ? 0 : data.size() / columns.size(); }
    [[nodiscard]] std::size_t columnCount() const noexcept { return columns.size(); }

    /// Throws TraceError if the column is absent.
    [[nodiscard]] std::size_t columnIndex(const std::string& name) const;
    [[nodiscard]] bool hasColumn(const std::string& name) const noexcept;
    [[nodiscard]] double at(std::size_t row, std::size_t col) const noexcept { return data[row * columns.size() + col]; }
    [[nodiscard]] std::span<const double> row(std::size_t r) const
    {
        return std::span<const double>(data).subspan(r * columns.size(), columns.size());
    }
    [[nodiscard]] std::vector<double> column(const std::string& name) const;
    [[nodiscard]] std::string metaValue(const std::string& key) const;

    void appendRow(std::span<const double> values);

    bool operator==(const SimulationTrace&) const = default;
};

/// CSV: `# key: value` header lines (meta, seed, resets), the column-name row,
/// then data rows at 17 significant digits.
void writeTrace(const SimulationTrace& trace, const std::filesystem::path& path);
SimulationTrace readTrace(const std::filesystem::path& path);

std::string formatTrace(const SimulationTrace& trace);
SimulationTrace parseTrace(const std::string& text, const std::string& origin = "<memory>");

} // namespace swdrem
