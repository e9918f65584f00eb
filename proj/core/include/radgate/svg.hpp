#pragma once

#include <optional>
#include <string>
#include <vector>

#include "radgate/fsutil.hpp"

namespace radgate::svg {

inline constexpr const char* kPurple = "#6a3d9a";
inline constexpr const char* kYellow = "#e8c31a";
inline constexpr const char* kMissingGray = "#bdbdbd";

enum class Kind { Bar, Line, Histogram, Heatmap };

struct Bar {
  std::string label;
  std::optional<double> value;
  bool highlight = false;
};

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool highlight = false;
};

struct Plot {
  Kind kind = Kind::Bar;
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 720;
  int height = 480;
  std::string highlight_color = kPurple;
  std::string plain_color = kYellow;

  // Bar
  std::vector<Bar> bars;
  bool log_scale = false;
  std::optional<double> threshold;  // horizontal reference line

  // Line: x/y in data units; `diagonal` draws the y = x reference.
  std::vector<Series> lines;
  bool diagonal = false;
  bool unit_axes = false;  // fix both axes to [0, 1]

  // Histogram: one panel per feature, laid out in a grid, one count series
  // per class in `series[i].y`.
  struct Panel {
    std::string title;
    std::vector<double> edges;
    std::vector<Series> series;
  };
  std::vector<Panel> panels;

  // Heatmap: square matrix with values in [0, 1].
  std::vector<std::string> names;
  std::vector<std::vector<std::optional<double>>> cells;
};

/// Byte-deterministic SVG document.
std::string render(const Plot& plot);

/// CSV of the data behind the plot.
std::string data_csv(const Plot& plot);

/// Renders and writes atomically; throws IoFailure.
void emit_svg(const Plot& plot, const fs::path& path);

}  // namespace radgate::svg
