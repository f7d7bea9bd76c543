#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace dynlab::app {

struct Series {
    std::string label;
    std::vector<double> y;
};

/// Minimal line chart. Non-finite points break the line; series longer than
/// x are cut to x.
void write_line_plot(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                     std::span<const double> x, const std::vector<Series>& series);

} // namespace dynlab::app
