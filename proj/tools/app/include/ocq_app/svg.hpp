#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ocq::app {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal line plot; output is illustrative only.
void write_svg_plot(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<Series>& series);

}  // namespace ocq::app
