#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace speedlearn::plot {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct Figure {
  std::string title;
  std::string x_label;  // with units, e.g. "time [s]"
  std::string y_label;
  std::vector<Series> series;
  bool equal_aspect = false;  // trajectories
};

// Standalone SVG line chart.
std::string render_svg(const Figure& fig);

// The plotted values, one block per series, numbers in round-trip form.
std::string render_table(const Figure& fig);

// Header names plus numeric columns of a comma-separated file.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  // Index of the column whose header starts with `name`; throws if absent.
  std::size_t column(const std::string& name) const;
};

Table read_table(const std::filesystem::path& path);

}  // namespace speedlearn::plot
