#include "chart.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

#include "adl/format.hpp"

namespace adl::cli {

namespace {

constexpr double kPanelWidth = 460;
constexpr double kPanelHeight = 320;
constexpr double kMarginLeft = 64;
constexpr double kMarginRight = 16;
constexpr double kMarginTop = 48;
constexpr double kMarginBottom = 48;
constexpr double kLegendHeight = 36;

std::string color_for(DictionaryMethod m) {
    switch (m) {
        case DictionaryMethod::Adl: return "#d62728";
        case DictionaryMethod::Wd: return "#333333";
        case DictionaryMethod::Random: return "#7f7f7f";
        case DictionaryMethod::Somd: return "#1f77b4";
        case DictionaryMethod::Ngasd: return "#2ca02c";
    }
    return "#000000";
}

std::string px(double v) { return format_fixed(v, 2); }

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

// "Nice" tick step covering [lo, hi] with about `count` intervals.
double nice_step(double span, int count) {
    const double raw = span / count;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    const double nice = norm < 1.5 ? 1 : norm < 3 ? 2 : norm < 7 ? 5 : 10;
    return nice * mag;
}

struct Series {
    DictionaryMethod method;
    std::vector<std::pair<double, double>> points;
};

void panel(std::ostringstream& out, double x0, const std::string& title, const std::string& ylabel,
           const std::vector<double>& rates, const std::vector<Series>& series, bool unit_interval) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            lo = std::min(lo, y);
            hi = std::max(hi, y);
        }
    if (!std::isfinite(lo)) {
        lo = 0;
        hi = 1;
    }
    if (unit_interval) {
        lo = std::max(0.0, lo);
        hi = std::min(1.0, hi);
    }
    if (hi - lo < 1e-9) {
        const double pad = std::max(std::abs(hi) * 0.05, 0.05);
        lo -= pad;
        hi += pad;
    }
    const double step = nice_step(hi - lo, 5);
    lo = std::floor(lo / step) * step;
    hi = std::ceil(hi / step) * step;

    const double xmin = rates.front();
    const double xmax = rates.size() > 1 ? rates.back() : rates.front() + 1.0;
    const double left = x0 + kMarginLeft;
    const double right = x0 + kPanelWidth - kMarginRight;
    const double top = kMarginTop;
    const double bottom = kPanelHeight - kMarginBottom;
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (right - left); };
    auto sy = [&](double y) { return bottom - (y - lo) / (hi - lo) * (bottom - top); };

    out << "<g class=\"panel\">\n";
    out << "<text x=\"" << px((left + right) / 2) << "\" y=\"" << px(top - 16)
        << "\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
    out << "<rect x=\"" << px(left) << "\" y=\"" << px(top) << "\" width=\"" << px(right - left) << "\" height=\""
        << px(bottom - top) << "\" fill=\"none\" stroke=\"#000\"/>\n";
    const int ticks = static_cast<int>(std::lround((hi - lo) / step));
    const int decimals = std::max(0, static_cast<int>(-std::floor(std::log10(step) + 1e-9)));
    for (int t = 0; t <= ticks; ++t) {
        const double v = lo + t * step;
        const double y = sy(v);
        out << "<line x1=\"" << px(left - 4) << "\" y1=\"" << px(y) << "\" x2=\"" << px(right) << "\" y2=\"" << px(y)
            << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << px(left - 6) << "\" y=\"" << px(y + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
            << format_fixed(v, decimals) << "</text>\n";
    }
    for (double r : rates) {
        const double x = sx(r);
        out << "<line x1=\"" << px(x) << "\" y1=\"" << px(bottom) << "\" x2=\"" << px(x) << "\" y2=\"" << px(bottom + 4)
            << "\" stroke=\"#000\"/>\n";
        out << "<text x=\"" << px(x) << "\" y=\"" << px(bottom + 18) << "\" text-anchor=\"middle\" font-size=\"11\">"
            << format_double(r) << "</text>\n";
    }
    out << "<text x=\"" << px((left + right) / 2) << "\" y=\"" << px(bottom + 38)
        << "\" text-anchor=\"middle\" font-size=\"12\">dictionary size rate</text>\n";
    out << "<text transform=\"translate(" << px(x0 + 16) << ' ' << px((top + bottom) / 2)
        << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" << xml_escape(ylabel) << "</text>\n";

    for (const auto& s : series) {
        if (s.points.empty()) continue;
        const std::string color = color_for(s.method);
        out << "<polyline class=\"series\" data-method=\"" << to_string(s.method) << "\" fill=\"none\" stroke=\""
            << color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < s.points.size(); ++i)
            out << (i ? " " : "") << px(sx(s.points[i].first)) << ',' << px(sy(s.points[i].second));
        out << "\"/>\n";
        for (const auto& [x, y] : s.points)
            out << "<circle cx=\"" << px(sx(x)) << "\" cy=\"" << px(sy(y)) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    out << "</g>\n";
}

}  // namespace

std::string render_trend_svg(const EvaluationReport& report, const std::string& dataset) {
    std::vector<Series> recon;
    std::vector<Series> accuracy;
    for (DictionaryMethod m : report.methods) {
        Series r{m, {}};
        Series a{m, {}};
        for (double rate : report.rates) {
            const auto key = std::make_pair(dataset, MethodRate{m, rate});
            if (auto it = report.dataset_recon_error.find(key); it != report.dataset_recon_error.end())
                r.points.emplace_back(rate, it->second);
            if (auto it = report.dataset_accuracy.find(key); it != report.dataset_accuracy.end())
                a.points.emplace_back(rate, it->second);
        }
        recon.push_back(std::move(r));
        accuracy.push_back(std::move(a));
    }

    const double width = 2 * kPanelWidth;
    const double height = kPanelHeight + kLegendHeight;
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(width) << "\" height=\"" << px(height)
        << "\" viewBox=\"0 0 " << px(width) << ' ' << px(height) << "\" font-family=\"sans-serif\">\n";
    out << "<title>" << xml_escape(dataset) << "</title>\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
    panel(out, 0, "Reconstruction: " + dataset, "mean reconstruction error", report.rates, recon, false);
    panel(out, kPanelWidth, "Classification: " + dataset, "mean accuracy", report.rates, accuracy, true);

    out << "<g class=\"legend\">\n";
    double lx = kMarginLeft;
    const double ly = kPanelHeight + kLegendHeight / 2;
    for (DictionaryMethod m : report.methods) {
        out << "<line x1=\"" << px(lx) << "\" y1=\"" << px(ly) << "\" x2=\"" << px(lx + 24) << "\" y2=\"" << px(ly)
            << "\" stroke=\"" << color_for(m) << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << px(lx + 30) << "\" y=\"" << px(ly + 4) << "\" font-size=\"12\">" << to_string(m)
            << "</text>\n";
        lx += 110;
    }
    out << "</g>\n</svg>\n";
    return out.str();
}

}  // namespace adl::cli
