#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include <stdexcept>

namespace bouss {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// shortest round-trip decimal representation, used everywhere so reruns of
// the same config produce bit-identical files
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::optional<double>>> rows;  // empty cell = absent
};

void write_csv(const std::string& path, const CsvTable& table);
void write_json(const std::string& path, const nlohmann::json& j);
void write_text(const std::string& path, const std::string& text);

// Self-contained SVG line plot (no external renderer). Each series is a list
// of (x, y); NaN y-values break the line.
struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
};

struct PlotSpec {
    std::string title;
    std::string xlabel, ylabel;
    bool logy = false;
    std::string annotation;  // drawn in the top-left corner
};

void write_svg_plot(const std::string& path, const std::vector<PlotSeries>& series, const PlotSpec& spec);

}  // namespace bouss
