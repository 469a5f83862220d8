#include "swdrem/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace swdrem {

namespace {

constexpr double kLogFloor = 1e-16;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 150;
constexpr int kMarginTop = 30;
constexpr int kMarginBottom = 40;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape(const std::string& text)
{
    std::string out;
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

double transformY(double v, bool logScale)
{
    if (!logScale)
        return v;
    return std::log10(std::max(std::abs(v), kLogFloor));
}

// Indices kept after per-pixel-column min/max decimation of x[begin, end).
std::vector<std::size_t> decimate(const std::vector<double>& x, const std::vector<double>& y, std::size_t begin,
                                  std::size_t end, double x0, double x1, int columns)
{
    std::vector<std::size_t> kept;
    if (end - begin <= 4) {
        for (std::size_t r = begin; r < end; ++r)
            kept.push_back(r);
        return kept;
    }
    const double span = x1 > x0 ? x1 - x0 : 1.0;
    std::size_t r = begin;
    while (r < end) {
        const long bucket = static_cast<long>(std::floor((x[r] - x0) / span * columns));
        std::size_t first = r;
        std::size_t lo = r;
        std::size_t hi = r;
        while (r < end && static_cast<long>(std::floor((x[r] - x0) / span * columns)) == bucket) {
            if (y[r] < y[lo])
                lo = r;
            if (y[r] > y[hi])
                hi = r;
            ++r;
        }
        std::size_t last = r - 1;
        std::size_t picks[4] = {first, std::min(lo, hi), std::max(lo, hi), last};
        for (std::size_t p : picks)
            if (kept.empty() || kept.back() != p)
                kept.push_back(p);
    }
    return kept;
}

} // namespace

std::string renderSvg(const Panel& panel, int width, int height)
{
    const int plotW = width - kMarginLeft - kMarginRight;
    const int plotH = height - kMarginTop - kMarginBottom;

    double xMin = std::numeric_limits<double>::infinity();
    double xMax = -xMin;
    double yMin = xMin;
    double yMax = -xMin;
    for (const auto& s : panel.series) {
        for (std::size_t r = 0; r < s.x.size() && r < s.y.size(); ++r) {
            if (!std::isfinite(s.x[r]) || !std::isfinite(s.y[r]))
                continue;
            const double v = transformY(s.y[r], panel.logScale);
            xMin = std::min(xMin, s.x[r]);
            xMax = std::max(xMax, s.x[r]);
            yMin = std::min(yMin, v);
            yMax = std::max(yMax, v);
        }
    }
    if (!std::isfinite(xMin)) {
        xMin = 0.0;
        xMax = 1.0;
        yMin = 0.0;
        yMax = 1.0;
    }
    if (xMax == xMin)
        xMax = xMin + 1.0;
    if (yMax == yMin) {
        yMin -= 0.5;
        yMax += 0.5;
    }
    const double pad = 0.05 * (yMax - yMin);
    yMin -= pad;
    yMax += pad;

    auto px = [&](double x) { return kMarginLeft + (x - xMin) / (xMax - xMin) * plotW; };
    auto py = [&](double y) { return kMarginTop + (yMax - y) / (yMax - yMin) * plotH; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kMarginLeft << "\" y=\"18\" font-size=\"13\">" << escape(panel.title) << "</text>\n";
    svg << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\"" << plotW << "\" height=\"" << plotH
        << "\" fill=\"none\" stroke=\"#444\"/>\n";

    for (int k = 0; k <= 4; ++k) {
        const double xv = xMin + (xMax - xMin) * k / 4.0;
        const double yv = yMin + (yMax - yMin) * k / 4.0;
        svg << "<text x=\"" << num(px(xv)) << "\" y=\"" << height - kMarginBottom + 15
            << "\" text-anchor=\"middle\">" << tick(xv) << "</text>\n";
        const std::string yText = panel.logScale ? "1e" + tick(yv) : tick(yv);
        svg << "<text x=\"" << kMarginLeft - 5 << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">" << yText
            << "</text>\n";
        svg << "<line x1=\"" << kMarginLeft << "\" x2=\"" << kMarginLeft + plotW << "\" y1=\"" << num(py(yv))
            << "\" y2=\"" << num(py(yv)) << "\" stroke=\"#eee\"/>\n";
    }
    svg << "<text x=\"" << kMarginLeft + plotW / 2 << "\" y=\"" << height - 6 << "\" text-anchor=\"middle\">t</text>\n";
    svg << "<text x=\"14\" y=\"" << kMarginTop + plotH / 2 << "\" transform=\"rotate(-90 14 " << kMarginTop + plotH / 2
        << ")\" text-anchor=\"middle\">" << escape(panel.yLabel) << "</text>\n";

    for (std::size_t k = 0; k < panel.series.size(); ++k) {
        const Series& s = panel.series[k];
        const char* colour = kPalette[k % std::size(kPalette)];
        const std::size_t count = std::min(s.x.size(), s.y.size());
        std::vector<double> ty(count);
        for (std::size_t r = 0; r < count; ++r)
            ty[r] = std::isfinite(s.y[r]) ? transformY(s.y[r], panel.logScale) : std::nan("");

        std::size_t r = 0;
        while (r < count) {
            while (r < count && !(std::isfinite(s.x[r]) && std::isfinite(ty[r])))
                ++r;
            const std::size_t begin = r;
            while (r < count && std::isfinite(s.x[r]) && std::isfinite(ty[r]))
                ++r;
            if (begin == r)
                continue;
            const auto kept = decimate(s.x, ty, begin, r, xMin, xMax, plotW);
            svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.2\"";
            if (s.dashed)
                svg << " stroke-dasharray=\"4 3\"";
            svg << " points=\"";
            for (std::size_t i = 0; i < kept.size(); ++i)
                svg << (i ? " " : "") << num(px(s.x[kept[i]])) << ',' << num(py(ty[kept[i]]));
            svg << "\"/>\n";
        }

        const int ly = kMarginTop + 14 + static_cast<int>(k) * 16;
        const int lx = kMarginLeft + plotW + 10;
        svg << "<line x1=\"" << lx << "\" x2=\"" << lx + 20 << "\" y1=\"" << ly - 4 << "\" y2=\"" << ly - 4
            << "\" stroke=\"" << colour << "\" stroke-width=\"1.5\"" << (s.dashed ? " stroke-dasharray=\"4 3\"" : "")
            << "/>\n";
        svg << "<text x=\"" << lx + 25 << "\" y=\"" << ly << "\">" << escape(s.label) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::vector<std::pair<std::string, Panel>> tracePanels(const SimulationTrace& trace)
{
    const auto t = trace.column("t");
    const auto sigma = trace.column("sigma");
    std::vector<std::pair<std::string, Panel>> panels;

    panels.push_back({"switching", Panel{"Active subsystem", "sigma", {Series{"sigma", t, sigma}}}});

    Panel excitation{"Excitation integrals", "integral of delta^2 while active", {}};
    Panel thetaErr{"Parameter error norms (dashed: inactive)", "||theta_err_i||", {}};
    Panel thetaLog{"Parameter error norms, log scale", "||theta_err_i||", {}, true};
    for (int i = 1; trace.hasColumn("theta_err_" + std::to_string(i)); ++i) {
        const std::string idx = std::to_string(i);
        if (trace.hasColumn("excitation_" + idx))
            excitation.series.push_back(Series{"subsystem " + idx, t, trace.column("excitation_" + idx)});
        const auto err = trace.column("theta_err_" + idx);
        std::vector<double> on(err.size(), std::nan(""));
        std::vector<double> off(err.size(), std::nan(""));
        for (std::size_t r = 0; r < err.size(); ++r) {
            const bool active = static_cast<int>(sigma[r]) == i;
            const bool prevActive = r > 0 && static_cast<int>(sigma[r - 1]) == i;
            if (active || prevActive)
                on[r] = err[r];
            if (!active || (r > 0 && !prevActive))
                off[r] = err[r];
        }
        thetaErr.series.push_back(Series{"subsystem " + idx + " active", t, on});
        thetaErr.series.push_back(Series{"subsystem " + idx + " inactive", t, off, true});
        thetaLog.series.push_back(Series{"subsystem " + idx, t, err});
    }
    panels.push_back({"excitation", excitation});
    panels.push_back({"theta_error", thetaErr});

    for (int k = 1; trace.hasColumn("x" + std::to_string(k)); ++k) {
        const std::string idx = std::to_string(k);
        Panel state{"State x" + idx + " and estimate", "x" + idx,
                    {Series{"x" + idx, t, trace.column("x" + idx)},
                     Series{"xhat" + idx, t, trace.column("xhat" + idx), true}}};
        panels.push_back({"state_" + idx, state});
    }

    if (trace.metaValue("mode") == "robust") {
        panels.push_back({"state_error", Panel{"State estimation error", "||x - xhat||",
                                               {Series{"||x_err||", t, trace.column("x_err")}}}});
        panels.push_back({"theta_error_log", thetaLog});
    }
    return panels;
}

std::vector<std::filesystem::path> renderPlots(const SimulationTrace& trace, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    for (const auto& [name, panel] : tracePanels(trace)) {
        const auto path = dir / (name + ".svg");
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw TraceError("cannot write '" + path.string() + "'");
        out << renderSvg(panel);
        written.push_back(path);
    }
    return written;
}

} // namespace swdrem
