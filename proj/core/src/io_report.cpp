#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vidseg/io.hpp"

namespace vidseg {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
    throw std::runtime_error(path.string() + ": " + what);
}

std::string fixed(double v, int digits) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(digits) << v;
    return out.str();
}

int widest_interval(std::span<const IntervalReport> reports) {
    int widest = 1;
    for (const IntervalReport& r : reports) {
        widest = std::max(widest, static_cast<int>(r.per_offset.size()));
    }
    return widest;
}

struct Series {
    std::string label;
    std::string color;
    std::vector<std::pair<double, double>> points;  // (interval, value)
};

// Maps data space onto one SVG panel and emits axes plus one polyline per
// series.
void draw_panel(std::ostream& out, double panel_x, double panel_y, double panel_w,
                double panel_h, const std::string& title, const std::string& y_label,
                const std::vector<Series>& series) {
    double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
    for (const Series& s : series) {
        for (const auto& [x, y] : s.points) {
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        }
    }
    if (x_min > x_max) return;
    if (x_max - x_min < 1e-9) {
        x_min -= 0.5;
        x_max += 0.5;
    }
    const double y_pad = std::max((y_max - y_min) * 0.1, 1e-3);
    y_min -= y_pad;
    y_max += y_pad;

    const auto sx = [&](double x) { return panel_x + (x - x_min) / (x_max - x_min) * panel_w; };
    const auto sy = [&](double y) { return panel_y + panel_h - (y - y_min) / (y_max - y_min) * panel_h; };

    out << "<rect x='" << panel_x << "' y='" << panel_y << "' width='" << panel_w
        << "' height='" << panel_h << "' fill='none' stroke='#444'/>\n";
    out << "<text x='" << panel_x + panel_w / 2 << "' y='" << panel_y - 10
        << "' text-anchor='middle' font-size='14'>" << title << "</text>\n";
    out << "<text x='" << panel_x - 42 << "' y='" << panel_y + panel_h / 2
        << "' text-anchor='middle' font-size='11' transform='rotate(-90 " << panel_x - 42 << ' '
        << panel_y + panel_h / 2 << ")'>" << y_label << "</text>\n";

    // Four horizontal gridlines with tick labels.
    for (int g = 0; g <= 3; ++g) {
        const double y = y_min + (y_max - y_min) * g / 3.0;
        out << "<line x1='" << panel_x << "' y1='" << sy(y) << "' x2='" << panel_x + panel_w
            << "' y2='" << sy(y) << "' stroke='#ddd'/>\n";
        out << "<text x='" << panel_x - 6 << "' y='" << sy(y) + 4
            << "' text-anchor='end' font-size='10'>" << fixed(y, 1) << "</text>\n";
    }
    for (double x = std::ceil(x_min); x <= x_max + 1e-9; x += 1.0) {
        out << "<text x='" << sx(x) << "' y='" << panel_y + panel_h + 14
            << "' text-anchor='middle' font-size='10'>" << static_cast<int>(x) << "</text>\n";
    }
    out << "<text x='" << panel_x + panel_w / 2 << "' y='" << panel_y + panel_h + 30
        << "' text-anchor='middle' font-size='11'>keyframe interval</text>\n";

    double legend_y = panel_y + 14;
    for (const Series& s : series) {
        out << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5' points='";
        for (const auto& [x, y] : s.points) out << sx(x) << ',' << sy(y) << ' ';
        out << "'/>\n";
        for (const auto& [x, y] : s.points) {
            out << "<circle cx='" << sx(x) << "' cy='" << sy(y) << "' r='2.4' fill='" << s.color
                << "'/>\n";
        }
        out << "<line x1='" << panel_x + panel_w - 92 << "' y1='" << legend_y << "' x2='"
            << panel_x + panel_w - 72 << "' y2='" << legend_y << "' stroke='" << s.color
            << "' stroke-width='1.5'/>\n";
        out << "<text x='" << panel_x + panel_w - 66 << "' y='" << legend_y + 4
            << "' font-size='11'>" << s.label << "</text>\n";
        legend_y += 15;
    }
}

std::vector<Series> collect(std::span<const IntervalReport> reports, const auto& value_of) {
    const std::map<SchemeMode, std::string> colors{{SchemeMode::baseline, "#666666"},
                                                   {SchemeMode::prop, "#d62728"},
                                                   {SchemeMode::inter, "#1f77b4"}};
    std::vector<Series> series;
    for (const auto& [scheme, color] : colors) {
        Series s{to_string(scheme), color, {}};
        for (const IntervalReport& r : reports) {
            if (r.scheme == scheme) {
                s.points.emplace_back(static_cast<double>(r.interval), value_of(r));
            }
        }
        std::sort(s.points.begin(), s.points.end());
        if (!s.points.empty()) series.push_back(std::move(s));
    }
    return series;
}

}  // namespace

void write_report_csv(std::span<const IntervalReport> reports,
                      const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(path, "cannot open for writing");

    const int widest = widest_interval(reports);
    out << "scheme,interval,miou_avg,miou_min,fps";
    for (int i = 0; i < widest; ++i) out << ",offset_" << i;
    out << '\n';
    for (const IntervalReport& r : reports) {
        out << to_string(r.scheme) << ',' << r.interval << ',' << fixed(r.miou_avg, 4) << ','
            << fixed(r.miou_min, 4) << ',' << fixed(r.fps, 2);
        for (int i = 0; i < widest; ++i) {
            out << ',';
            if (i < static_cast<int>(r.per_offset.size())) out << fixed(r.per_offset[i], 4);
        }
        out << '\n';
    }
    if (!out) fail(path, "write failed");
}

void write_report_svg(std::span<const IntervalReport> reports,
                      const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(path, "cannot open for writing");

    out << "<svg xmlns='http://www.w3.org/2000/svg' width='900' height='360' "
           "font-family='sans-serif'>\n";
    out << "<rect width='900' height='360' fill='white'/>\n";
    draw_panel(out, 70, 40, 330, 260, "accuracy", "mIoU (%)",
               collect(reports, [](const IntervalReport& r) { return r.miou_avg; }));
    draw_panel(out, 510, 40, 330, 260, "throughput", "frames per second",
               collect(reports, [](const IntervalReport& r) { return r.fps; }));
    out << "</svg>\n";
    if (!out) fail(path, "write failed");
}

}  // namespace vidseg
