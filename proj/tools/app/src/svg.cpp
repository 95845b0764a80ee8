#include "ocq_app/svg.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include "ocq/io/digest.hpp"

namespace ocq::app {

void write_svg_plot(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<Series>& series) {
    constexpr double W = 720, H = 460, L = 70, R = 20, T = 40, B = 50;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
        for (double v : s.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
    }
    if (!(x1 > x0)) x1 = x0 + 1.0;
    if (!(y1 > y0)) y1 = y0 + 1.0;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

    std::ofstream out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title << "</text>\n"
        << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
        << "\" fill=\"none\" stroke=\"black\"/>\n"
        << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << x_label << "</text>\n"
        << "<text x=\"16\" y=\"" << H / 2 << "\" transform=\"rotate(-90 16 " << H / 2 << ")\" text-anchor=\"middle\">"
        << y_label << "</text>\n";
    for (double f : {0.0, 0.5, 1.0}) {
        out << "<text x=\"" << px(x0 + f * (x1 - x0)) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
            << io::format_double(x0 + f * (x1 - x0)) << "</text>\n"
            << "<text x=\"" << L - 6 << "\" y=\"" << py(y0 + f * (y1 - y0)) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
            << io::format_double(y0 + f * (y1 - y0)) << "</text>\n";
    }
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = colors[s % std::size(colors)];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < std::min(series[s].x.size(), series[s].y.size()); ++i) {
            out << px(series[s].x[i]) << ',' << py(series[s].y[i]) << ' ';
        }
        out << "\"/>\n<text x=\"" << W - R - 8 << "\" y=\"" << T + 16 + 14 * static_cast<double>(s)
            << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << color << "\">" << series[s].label << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace ocq::app
