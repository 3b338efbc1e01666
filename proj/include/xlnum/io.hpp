#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "xlnum/common.hpp"

namespace xlnum {

// 9 significant digits; all emitted numbers go through this so reruns are
// byte-identical.
std::string format_number(double v);

class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path,
              const std::vector<std::string>& header);

    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& values);

  private:
    std::ofstream out_;
    std::size_t columns_;
};

// Minimal static polyline chart.
struct SvgSeries {
    std::string label;
    std::string color = "#1f77b4";
    std::vector<double> x, y;
};

void write_svg_chart(const std::filesystem::path& path, const std::string& title,
                     const std::vector<SvgSeries>& series);

void ensure_directory(const std::filesystem::path& dir);

}  // namespace xlnum
