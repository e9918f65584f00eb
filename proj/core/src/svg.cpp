#include "radgate/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "radgate/csv.hpp"
#include "radgate/error.hpp"
#include "radgate/numfmt.hpp"

namespace radgate::svg {

namespace {

constexpr std::array<const char*, 6> kSeriesPalette{"#6a3d9a", "#e8c31a", "#1f78b4", "#33a02c", "#e31a1c", "#ff7f00"};

std::string num(double v) { return format_significant(v, 6); }

std::string escape(const std::string& text) {
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

struct Frame {
  double left, top, right, bottom;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;

  double px(double x) const { return left + (x - x0) / (x1 - x0) * (right - left); }
  double py(double y) const { return bottom - (y - y0) / (y1 - y0) * (bottom - top); }
};

class Writer {
 public:
  explicit Writer(const Plot& p) {
    out_ += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(p.width) + "\" height=\"" +
            std::to_string(p.height) + "\" viewBox=\"0 0 " + std::to_string(p.width) + " " +
            std::to_string(p.height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out_ += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(p.width) + "\" height=\"" + std::to_string(p.height) +
            "\" fill=\"#ffffff\"/>\n";
    if (!p.title.empty())
      text(p.width / 2.0, 20, p.title, "middle", "font-size=\"14\"");
  }

  void line(double x1, double y1, double x2, double y2, const std::string& stroke, const std::string& extra = "") {
    out_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
            "\" stroke=\"" + stroke + "\"" + (extra.empty() ? "" : " " + extra) + "/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill, const std::string& cls,
            const std::string& extra = "") {
    out_ += "<rect class=\"" + cls + "\" x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
            "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"" + (extra.empty() ? "" : " " + extra) + "/>\n";
  }

  void text(double x, double y, const std::string& s, const std::string& anchor, const std::string& extra = "") {
    out_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor + "\"" +
            (extra.empty() ? "" : " " + extra) + ">" + escape(s) + "</text>\n";
  }

  void raw(const std::string& s) { out_ += s; }

  std::string finish() {
    out_ += "</svg>\n";
    return std::move(out_);
  }

 private:
  std::string out_;
};

void axes(Writer& w, const Frame& f, const Plot& p, bool x_ticks) {
  w.line(f.left, f.bottom, f.right, f.bottom, "#000000");
  w.line(f.left, f.top, f.left, f.bottom, "#000000");
  for (int i = 0; i <= 4; ++i) {
    double v = f.y0 + (f.y1 - f.y0) * i / 4.0;
    double y = f.py(v);
    w.line(f.left - 4, y, f.left, y, "#000000");
    w.text(f.left - 6, y + 4, num(v), "end");
  }
  if (x_ticks) {
    for (int i = 0; i <= 4; ++i) {
      double v = f.x0 + (f.x1 - f.x0) * i / 4.0;
      double x = f.px(v);
      w.line(x, f.bottom, x, f.bottom + 4, "#000000");
      w.text(x, f.bottom + 16, num(v), "middle");
    }
  }
  if (!p.x_label.empty()) w.text((f.left + f.right) / 2, p.height - 8.0, p.x_label, "middle");
  if (!p.y_label.empty())
    w.text(16, (f.top + f.bottom) / 2, p.y_label, "middle",
           "transform=\"rotate(-90 16 " + num((f.top + f.bottom) / 2) + ")\"");
}

void render_bars(Writer& w, const Plot& p) {
  Frame f{70, 40, p.width - 20.0, p.height - 140.0};
  auto scaled = [&](double v) { return p.log_scale ? std::log10(v) : v; };
  double lo = 0, hi = 0;
  bool any = false;
  auto include = [&](double v) {
    if (p.log_scale && !(v > 0)) return;
    double s = scaled(v);
    if (!any) {
      lo = hi = s;
      any = true;
    }
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  };
  for (const auto& b : p.bars)
    if (b.value && std::isfinite(*b.value)) include(*b.value);
  if (p.threshold) include(*p.threshold);
  if (p.log_scale) {
    lo = std::floor(any ? lo : 0.0);
    hi = std::max(std::ceil(any ? hi : 0.0), lo + 1);
  } else {
    lo = std::min(lo, 0.0);
    hi = std::max(hi, 0.0);
    if (hi == lo) hi = lo + 1;
  }
  f.y0 = lo;
  f.y1 = hi;
  axes(w, f, p, false);

  const double slot = p.bars.empty() ? 0.0 : (f.right - f.left) / static_cast<double>(p.bars.size());
  const double base = f.py(p.log_scale ? lo : 0.0);
  for (std::size_t i = 0; i < p.bars.size(); ++i) {
    const Bar& b = p.bars[i];
    double x = f.left + slot * static_cast<double>(i) + slot * 0.1;
    double cx = f.left + slot * (static_cast<double>(i) + 0.5);
    if (b.value && std::isfinite(*b.value) && (!p.log_scale || *b.value > 0)) {
      double top = f.py(scaled(*b.value));
      w.rect(x, std::min(top, base), slot * 0.8, std::abs(base - top),
             b.highlight ? p.highlight_color : p.plain_color, "bar");
    }
    double ly = f.bottom + 10;
    w.text(cx, ly, b.label, "end", "transform=\"rotate(-60 " + num(cx) + " " + num(ly) + ")\"");
  }
  if (p.threshold && (!p.log_scale || *p.threshold > 0)) {
    double y = f.py(scaled(*p.threshold));
    w.line(f.left, y, f.right, y, "#e31a1c", "stroke-dasharray=\"6 4\" class=\"threshold\"");
  }
}

void render_lines(Writer& w, const Plot& p) {
  Frame f{70, 40, p.width - 180.0, p.height - 50.0};
  if (!p.unit_axes) {
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
    for (const auto& s : p.lines) {
      for (double x : s.x) xlo = std::min(xlo, x), xhi = std::max(xhi, x);
      for (double y : s.y) ylo = std::min(ylo, y), yhi = std::max(yhi, y);
    }
    if (xlo <= xhi) f.x0 = xlo, f.x1 = xhi > xlo ? xhi : xlo + 1;
    if (ylo <= yhi) f.y0 = ylo, f.y1 = yhi > ylo ? yhi : ylo + 1;
  }
  axes(w, f, p, true);
  if (p.diagonal) w.line(f.px(0), f.py(0), f.px(1), f.py(1), "#7f7f7f", "stroke-dasharray=\"4 4\"");
  double legend_y = f.top + 4;
  for (const auto& s : p.lines) {
    const std::string& color = s.highlight ? p.highlight_color : p.plain_color;
    std::string points;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (i) points += ' ';
      points += num(f.px(s.x[i])) + "," + num(f.py(s.y[i]));
    }
    w.raw("<polyline class=\"curve\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"" + points +
          "\"/>\n");
    w.line(f.right + 10, legend_y, f.right + 26, legend_y, color, "stroke-width=\"2\"");
    w.text(f.right + 30, legend_y + 4, s.label, "start");
    legend_y += 14;
  }
}

void render_histogram(Writer& w, const Plot& p) {
  const std::size_t n = p.panels.size();
  std::size_t cols = 1;
  while (cols * cols < n) ++cols;
  const std::size_t rows = n ? (n + cols - 1) / cols : 1;
  const double legend = 120;
  const double cell_w = (p.width - legend) / static_cast<double>(cols);
  const double cell_h = (p.height - 50.0) / static_cast<double>(rows);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& panel = p.panels[i];
    const double x = cell_w * static_cast<double>(i % cols), y = 30 + cell_h * static_cast<double>(i / cols);
    Frame f{x + 55, y + 24, x + cell_w - 12, y + cell_h - 30};
    if (panel.edges.size() >= 2) {
      f.x0 = panel.edges.front();
      f.x1 = panel.edges.back();
    }
    double top = 1;
    for (const auto& s : panel.series)
      for (double v : s.y) top = std::max(top, v);
    f.y1 = top;
    Plot frame_only = p;
    frame_only.x_label.clear();
    frame_only.y_label.clear();
    w.raw("<g class=\"panel\">\n");
    w.text((f.left + f.right) / 2, y + 14, panel.title, "middle");
    axes(w, f, frame_only, true);
    for (std::size_t k = 0; k < panel.series.size(); ++k) {
      const auto& s = panel.series[k];
      if (std::find(labels.begin(), labels.end(), s.label) == labels.end()) labels.push_back(s.label);
      auto slot = static_cast<std::size_t>(std::find(labels.begin(), labels.end(), s.label) - labels.begin());
      const char* color = kSeriesPalette[slot % kSeriesPalette.size()];
      for (std::size_t b = 0; b + 1 < panel.edges.size() && b < s.y.size(); ++b) {
        if (s.y[b] <= 0) continue;
        double x0 = f.px(panel.edges[b]), x1 = f.px(panel.edges[b + 1]);
        double top_y = f.py(s.y[b]);
        w.rect(x0, top_y, x1 - x0, f.bottom - top_y, color, "hist", "fill-opacity=\"0.5\"");
      }
    }
    w.raw("</g>\n");
  }
  double legend_y = 44;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const char* color = kSeriesPalette[k % kSeriesPalette.size()];
    w.rect(p.width - legend + 10, legend_y - 8, 12, 10, color, "legend", "fill-opacity=\"0.5\"");
    w.text(p.width - legend + 26, legend_y + 1, labels[k].empty() ? "(missing)" : labels[k], "start");
    legend_y += 14;
  }
  if (!p.x_label.empty()) w.text((p.width - legend) / 2, p.height - 8.0, p.x_label, "middle");
}

std::string heat_color(double v) {
  v = std::clamp(v, 0.0, 1.0);
  // White to purple ramp.
  auto channel = [&](int from, int to) { return static_cast<int>(std::lround(from + (to - from) * v)); };
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", channel(255, 0x6a), channel(255, 0x3d), channel(255, 0x9a));
  return buf;
}

void render_heatmap(Writer& w, const Plot& p) {
  const std::size_t n = p.cells.size();
  const double left = 160, top = 40;
  const double side = std::min(p.width - left - 100.0, p.height - top - 150.0);
  const double cell = n ? side / static_cast<double>(n) : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p.cells[i].size(); ++j) {
      const auto& v = p.cells[i][j];
      w.rect(left + cell * static_cast<double>(j), top + cell * static_cast<double>(i), cell, cell,
             v ? heat_color(*v) : std::string(kMissingGray), "cell",
             "data-value=\"" + (v ? num(*v) : std::string()) + "\"");
    }
    if (i < p.names.size()) {
      w.text(left - 6, top + cell * (static_cast<double>(i) + 0.5) + 4, p.names[i], "end");
      double cx = left + cell * (static_cast<double>(i) + 0.5), ly = top + side + 10;
      w.text(cx, ly, p.names[i], "end", "transform=\"rotate(-60 " + num(cx) + " " + num(ly) + ")\"");
    }
  }
  const double bar_x = left + side + 30;
  w.raw("<g class=\"colorbar\">\n");
  constexpr int kSteps = 10;
  for (int s = 0; s < kSteps; ++s) {
    double v = (kSteps - 1 - s) / static_cast<double>(kSteps - 1);
    w.rect(bar_x, top + side * s / kSteps, 16, side / kSteps, heat_color(v), "scale");
  }
  w.text(bar_x + 20, top + 8, "1", "start");
  w.text(bar_x + 20, top + side, "0", "start");
  w.raw("</g>\n");
}

}  // namespace

std::string render(const Plot& plot) {
  Writer w(plot);
  switch (plot.kind) {
    case Kind::Bar: render_bars(w, plot); break;
    case Kind::Line: render_lines(w, plot); break;
    case Kind::Histogram: render_histogram(w, plot); break;
    case Kind::Heatmap: render_heatmap(w, plot); break;
  }
  return w.finish();
}

std::string data_csv(const Plot& plot) {
  auto cell = [](const std::optional<double>& v) { return v ? format_shortest(*v) : std::string(); };
  CsvWriter w;
  switch (plot.kind) {
    case Kind::Bar:
      w.row({"label", "value", "highlight"});
      for (const auto& b : plot.bars) w.row({b.label, cell(b.value), b.highlight ? "1" : "0"});
      break;
    case Kind::Line:
      w.row({"series", "x", "y", "highlight"});
      for (const auto& s : plot.lines)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
          w.row({s.label, format_shortest(s.x[i]), format_shortest(s.y[i]), s.highlight ? "1" : "0"});
      break;
    case Kind::Histogram:
      w.row({"panel", "series", "bin_left", "bin_right", "count"});
      for (const auto& panel : plot.panels)
        for (const auto& s : panel.series)
          for (std::size_t b = 0; b + 1 < panel.edges.size() && b < s.y.size(); ++b)
            w.row({panel.title, s.label, format_shortest(panel.edges[b]), format_shortest(panel.edges[b + 1]),
                   format_shortest(s.y[b])});
      break;
    case Kind::Heatmap: {
      std::vector<std::string> header{"feature"};
      header.insert(header.end(), plot.names.begin(), plot.names.end());
      w.row(header);
      for (std::size_t i = 0; i < plot.cells.size(); ++i) {
        std::vector<std::string> row{i < plot.names.size() ? plot.names[i] : std::string()};
        for (const auto& v : plot.cells[i]) row.push_back(cell(v));
        w.row(row);
      }
      break;
    }
  }
  return w.str();
}

void emit_svg(const Plot& plot, const fs::path& path) { write_file_atomic(path, render(plot)); }

}  // namespace radgate::svg
