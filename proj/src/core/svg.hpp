#pragma once

#include <string>
#include <utility>
#include <vector>

namespace aetas::svg {

// Publication-draft charts emitted as standalone SVG strings. `stamp` is an
// ISO timestamp embedded as a comment; empty disables it so byte-identical
// reruns stay byte-identical.

struct Stem {
  std::string label;  // e.g. "word 1700s-1720s"
  std::string group;  // domain tag, drives stem color
  double value = 0.0;
};
std::string lollipop_chart(const std::string& title, const std::vector<Stem>& stems,
                           const std::string& y_label, const std::string& stamp);

struct TrajectoryPointSvg {
  std::string bin;
  double x = 0.0;
  double y = 0.0;
};
struct TrajectorySeries {
  std::string word;
  std::vector<TrajectoryPointSvg> points;  // chronological
};
std::string trajectory_chart(const std::string& title,
                             const std::vector<TrajectorySeries>& series,
                             const std::string& stamp);

struct AxisPoint {
  std::string bin;
  double score = 0.0;
  bool has_band = false;
  double band_min = 0.0;
  double band_max = 0.0;
};
struct AxisSeries {
  std::string label;  // "axis: word"
  std::vector<AxisPoint> points;
};
std::string axis_chart(const std::string& title, const std::vector<AxisSeries>& series,
                       const std::string& stamp);

struct BarGroup {
  std::string label;
  std::vector<std::pair<std::string, double>> bars;  // (series, value)
};
std::string grouped_bar_chart(const std::string& title,
                              const std::vector<BarGroup>& groups,
                              const std::string& y_label, const std::string& stamp);

struct WhiskerBar {
  std::string label;
  double mean = 0.0;
  double std = 0.0;
};
std::string whisker_bar_chart(const std::string& title,
                              const std::vector<WhiskerBar>& bars,
                              const std::string& y_label, const std::string& stamp);

struct HeatCell {
  std::string row;  // word
  std::string col;  // span
  double z = 0.0;
  bool defined = true;
};
// Cell fill is rgb(r,64,b) with r rising and b falling in z, so the red
// minus blue channel is monotone in z; defined cells carry a data-z
// attribute for parse-back checks.
std::string z_heatmap(const std::string& title, const std::vector<HeatCell>& cells,
                      const std::string& stamp);

}  // namespace aetas::svg
