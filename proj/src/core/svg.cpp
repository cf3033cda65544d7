#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "util.hpp"

namespace aetas::svg {

namespace {

constexpr double kWidth = 860;
constexpr double kHeight = 460;
constexpr double kMarginLeft = 70;
constexpr double kMarginRight = 30;
constexpr double kMarginTop = 50;
constexpr double kMarginBottom = 90;

const char* kPalette[] = {"#2c6fbb", "#c23b22", "#3f8f4a", "#8a5fbf",
                          "#b8860b", "#367588", "#a04060", "#556b2f"};

std::string esc(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Linear map from data to pixel space; pads a degenerate range so a single
// value still lands mid-plot.
struct Scale {
  double d0 = 0.0, d1 = 1.0, p0 = 0.0, p1 = 1.0;

  Scale(double data_min, double data_max, double px0, double px1) {
    if (data_max - data_min < 1e-12) {
      data_min -= 1.0;
      data_max += 1.0;
    }
    d0 = data_min;
    d1 = data_max;
    p0 = px0;
    p1 = px1;
  }
  double operator()(double v) const { return p0 + (v - d0) / (d1 - d0) * (p1 - p0); }
};

std::string open_svg(const std::string& title, const std::string& stamp) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
                  "\" height=\"" + num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) +
                  " " + num(kHeight) + "\" font-family=\"sans-serif\">\n";
  if (!stamp.empty()) s += "<!-- generated " + esc(stamp) + " -->\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kWidth / 2) +
       "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" + esc(title) +
       "</text>\n";
  return s;
}

std::string y_axis(const Scale& sy, const std::string& label) {
  std::string s;
  s += "<line x1=\"" + num(kMarginLeft) + "\" y1=\"" + num(kMarginTop) + "\" x2=\"" +
       num(kMarginLeft) + "\" y2=\"" + num(kHeight - kMarginBottom) +
       "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double v = sy.d0 + (sy.d1 - sy.d0) * i / 4.0;
    double y = sy(v);
    s += "<line x1=\"" + num(kMarginLeft - 4) + "\" y1=\"" + num(y) + "\" x2=\"" +
         num(kMarginLeft) + "\" y2=\"" + num(y) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(kMarginLeft - 8) + "\" y=\"" + num(y + 4) +
         "\" text-anchor=\"end\" font-size=\"11\">" + num(v) + "</text>\n";
  }
  if (!label.empty())
    s += "<text x=\"16\" y=\"" + num((kMarginTop + kHeight - kMarginBottom) / 2) +
         "\" font-size=\"12\" transform=\"rotate(-90 16 " +
         num((kMarginTop + kHeight - kMarginBottom) / 2) + ")\" text-anchor=\"middle\">" +
         esc(label) + "</text>\n";
  return s;
}

std::string x_tick_label(double x, const std::string& text) {
  double y = kHeight - kMarginBottom + 12;
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) +
         "\" font-size=\"10\" text-anchor=\"end\" transform=\"rotate(-45 " + num(x) +
         " " + num(y) + ")\">" + esc(text) + "</text>\n";
}

std::string baseline(double y) {
  return "<line x1=\"" + num(kMarginLeft) + "\" y1=\"" + num(y) + "\" x2=\"" +
         num(kWidth - kMarginRight) + "\" y2=\"" + num(y) +
         "\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>\n";
}

const char* group_color(std::map<std::string, const char*>& assigned,
                        const std::string& group) {
  auto it = assigned.find(group);
  if (it != assigned.end()) return it->second;
  const char* c = kPalette[assigned.size() % (sizeof kPalette / sizeof *kPalette)];
  assigned.emplace(group, c);
  return c;
}

std::string legend(const std::map<std::string, const char*>& colors) {
  std::string s;
  double x = kMarginLeft + 10, y = kMarginTop - 14;
  for (const auto& [name, color] : colors) {
    s += "<rect x=\"" + num(x) + "\" y=\"" + num(y - 9) +
         "\" width=\"10\" height=\"10\" fill=\"" + std::string(color) + "\"/>\n";
    s += "<text x=\"" + num(x + 14) + "\" y=\"" + num(y) + "\" font-size=\"11\">" +
         esc(name) + "</text>\n";
    x += 18.0 + 7.0 * name.size() + 16.0;
  }
  return s;
}

}  // namespace

std::string lollipop_chart(const std::string& title, const std::vector<Stem>& stems,
                           const std::string& y_label, const std::string& stamp) {
  double lo = 0.0, hi = 0.0;
  for (const auto& s : stems) {
    lo = std::min(lo, s.value);
    hi = std::max(hi, s.value);
  }
  Scale sy(lo, hi, kHeight - kMarginBottom, kMarginTop);
  std::string out = open_svg(title, stamp);
  out += y_axis(sy, y_label);
  out += baseline(sy(0.0));

  std::map<std::string, const char*> colors;
  double span = kWidth - kMarginLeft - kMarginRight;
  for (std::size_t i = 0; i < stems.size(); ++i) {
    double x = kMarginLeft + span * (i + 0.5) / std::max<std::size_t>(stems.size(), 1);
    const char* color = group_color(colors, stems[i].group);
    out += "<line class=\"stem\" x1=\"" + num(x) + "\" y1=\"" + num(sy(0.0)) +
           "\" x2=\"" + num(x) + "\" y2=\"" + num(sy(stems[i].value)) + "\" stroke=\"" +
           color + "\" stroke-width=\"2\"/>\n";
    out += "<circle cx=\"" + num(x) + "\" cy=\"" + num(sy(stems[i].value)) +
           "\" r=\"5\" fill=\"" + color + "\"/>\n";
    out += x_tick_label(x, stems[i].label);
  }
  out += legend(colors);
  return out + "</svg>\n";
}

std::string trajectory_chart(const std::string& title,
                             const std::vector<TrajectorySeries>& series,
                             const std::string& stamp) {
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  bool first = true;
  for (const auto& s : series)
    for (const auto& p : s.points) {
      if (first) {
        xmin = xmax = p.x;
        ymin = ymax = p.y;
        first = false;
      }
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  Scale sx(xmin, xmax, kMarginLeft + 10, kWidth - kMarginRight - 10);
  Scale sy(ymin, ymax, kHeight - kMarginBottom, kMarginTop);

  std::string out = open_svg(title, stamp);
  out += "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" "
         "markerWidth=\"7\" markerHeight=\"7\" orient=\"auto-start-reverse\">"
         "<path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"context-stroke\"/>"
         "</marker></defs>\n";
  std::map<std::string, const char*> colors;
  for (const auto& s : series) {
    const char* color = group_color(colors, s.word);
    for (std::size_t i = 1; i < s.points.size(); ++i) {
      out += "<line class=\"arrow\" x1=\"" + num(sx(s.points[i - 1].x)) + "\" y1=\"" +
             num(sy(s.points[i - 1].y)) + "\" x2=\"" + num(sx(s.points[i].x)) +
             "\" y2=\"" + num(sy(s.points[i].y)) + "\" stroke=\"" + color +
             "\" stroke-width=\"1.5\" marker-end=\"url(#arrow)\"/>\n";
    }
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      const auto& p = s.points[i];
      out += "<circle cx=\"" + num(sx(p.x)) + "\" cy=\"" + num(sy(p.y)) +
             "\" r=\"4\" fill=\"" + color + "\"/>\n";
      out += "<text x=\"" + num(sx(p.x) + 6) + "\" y=\"" + num(sy(p.y) - 6) +
             "\" font-size=\"9\">" + esc(p.bin) + "</text>\n";
    }
  }
  out += legend(colors);
  return out + "</svg>\n";
}

std::string axis_chart(const std::string& title, const std::vector<AxisSeries>& series,
                       const std::string& stamp) {
  // Shared categorical x over the union of bins, in first-seen order.
  std::vector<std::string> bins;
  auto bin_index = [&](const std::string& b) {
    for (std::size_t i = 0; i < bins.size(); ++i)
      if (bins[i] == b) return i;
    bins.push_back(b);
    return bins.size() - 1;
  };
  double lo = 0.0, hi = 0.0;
  for (const auto& s : series)
    for (const auto& p : s.points) {
      bin_index(p.bin);
      lo = std::min({lo, p.score, p.has_band ? p.band_min : p.score});
      hi = std::max({hi, p.score, p.has_band ? p.band_max : p.score});
    }
  Scale sy(lo, hi, kHeight - kMarginBottom, kMarginTop);
  double span = kWidth - kMarginLeft - kMarginRight;
  auto xpos = [&](std::size_t i) {
    return kMarginLeft + span * (i + 0.5) / std::max<std::size_t>(bins.size(), 1);
  };

  std::string out = open_svg(title, stamp);
  out += y_axis(sy, "axis score");
  out += baseline(sy(0.0));
  std::map<std::string, const char*> colors;
  for (const auto& s : series) {
    const char* color = group_color(colors, s.label);
    // Band polygon first so lines draw on top.
    bool banded = std::any_of(s.points.begin(), s.points.end(),
                              [](const AxisPoint& p) { return p.has_band; });
    if (banded && s.points.size() > 1) {
      std::string pts;
      for (const auto& p : s.points)
        pts += num(xpos(bin_index(p.bin))) + "," +
               num(sy(p.has_band ? p.band_max : p.score)) + " ";
      for (auto it = s.points.rbegin(); it != s.points.rend(); ++it)
        pts += num(xpos(bin_index(it->bin))) + "," +
               num(sy(it->has_band ? it->band_min : it->score)) + " ";
      out += "<polygon class=\"band\" points=\"" + pts + "\" fill=\"" + color +
             "\" opacity=\"0.18\"/>\n";
    }
    for (std::size_t i = 1; i < s.points.size(); ++i)
      out += "<line x1=\"" + num(xpos(bin_index(s.points[i - 1].bin))) + "\" y1=\"" +
             num(sy(s.points[i - 1].score)) + "\" x2=\"" +
             num(xpos(bin_index(s.points[i].bin))) + "\" y2=\"" +
             num(sy(s.points[i].score)) + "\" stroke=\"" + color +
             "\" stroke-width=\"2\"/>\n";
    for (const auto& p : s.points)
      out += "<circle cx=\"" + num(xpos(bin_index(p.bin))) + "\" cy=\"" +
             num(sy(p.score)) + "\" r=\"3.5\" fill=\"" + color + "\"/>\n";
  }
  for (std::size_t i = 0; i < bins.size(); ++i) out += x_tick_label(xpos(i), bins[i]);
  out += legend(colors);
  return out + "</svg>\n";
}

std::string grouped_bar_chart(const std::string& title,
                              const std::vector<BarGroup>& groups,
                              const std::string& y_label, const std::string& stamp) {
  double lo = 0.0, hi = 0.0;
  std::vector<std::string> series_names;
  for (const auto& g : groups)
    for (const auto& [name, v] : g.bars) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      if (std::find(series_names.begin(), series_names.end(), name) ==
          series_names.end())
        series_names.push_back(name);
    }
  Scale sy(lo, hi, kHeight - kMarginBottom, kMarginTop);
  std::string out = open_svg(title, stamp);
  out += y_axis(sy, y_label);

  std::map<std::string, const char*> colors;
  for (const auto& name : series_names) group_color(colors, name);

  double span = kWidth - kMarginLeft - kMarginRight;
  double slot = span / std::max<std::size_t>(groups.size(), 1);
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& g = groups[gi];
    double x0 = kMarginLeft + slot * gi;
    double bar_w = slot * 0.8 / std::max<std::size_t>(g.bars.size(), 1);
    for (std::size_t bi = 0; bi < g.bars.size(); ++bi) {
      double x = x0 + slot * 0.1 + bar_w * bi;
      double y = sy(g.bars[bi].second);
      double y0 = sy(0.0);
      out += "<rect class=\"bar\" x=\"" + num(x) + "\" y=\"" + num(std::min(y, y0)) +
             "\" width=\"" + num(bar_w * 0.92) + "\" height=\"" +
             num(std::fabs(y0 - y)) + "\" fill=\"" +
             group_color(colors, g.bars[bi].first) + "\"/>\n";
    }
    out += x_tick_label(x0 + slot / 2, g.label);
  }
  out += legend(colors);
  return out + "</svg>\n";
}

std::string whisker_bar_chart(const std::string& title,
                              const std::vector<WhiskerBar>& bars,
                              const std::string& y_label, const std::string& stamp) {
  double lo = 0.0, hi = 0.0;
  for (const auto& b : bars) {
    if (std::isfinite(b.mean)) {
      double s = std::isfinite(b.std) ? b.std : 0.0;
      lo = std::min(lo, b.mean - s);
      hi = std::max(hi, b.mean + s);
    }
  }
  Scale sy(lo, hi, kHeight - kMarginBottom, kMarginTop);
  std::string out = open_svg(title, stamp);
  out += y_axis(sy, y_label);
  double span = kWidth - kMarginLeft - kMarginRight;
  double slot = span / std::max<std::size_t>(bars.size(), 1);
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto& b = bars[i];
    double xc = kMarginLeft + slot * (i + 0.5);
    if (std::isfinite(b.mean)) {
      double y = sy(b.mean), y0 = sy(0.0);
      out += "<rect class=\"bar\" x=\"" + num(xc - slot * 0.3) + "\" y=\"" +
             num(std::min(y, y0)) + "\" width=\"" + num(slot * 0.6) + "\" height=\"" +
             num(std::fabs(y0 - y)) + "\" fill=\"#2c6fbb\"/>\n";
      if (std::isfinite(b.std) && b.std > 0.0) {
        out += "<line x1=\"" + num(xc) + "\" y1=\"" + num(sy(b.mean - b.std)) +
               "\" x2=\"" + num(xc) + "\" y2=\"" + num(sy(b.mean + b.std)) +
               "\" stroke=\"black\"/>\n";
        for (double v : {b.mean - b.std, b.mean + b.std})
          out += "<line x1=\"" + num(xc - 5) + "\" y1=\"" + num(sy(v)) + "\" x2=\"" +
                 num(xc + 5) + "\" y2=\"" + num(sy(v)) + "\" stroke=\"black\"/>\n";
      }
    } else {
      out += "<text x=\"" + num(xc) + "\" y=\"" + num(sy(0.0) - 6) +
             "\" font-size=\"10\" text-anchor=\"middle\">n/a</text>\n";
    }
    out += x_tick_label(xc, b.label);
  }
  return out + "</svg>\n";
}

std::string z_heatmap(const std::string& title, const std::vector<HeatCell>& cells,
                      const std::string& stamp) {
  std::vector<std::string> rows, cols;
  auto index_of = [](std::vector<std::string>& v, const std::string& s) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] == s) return i;
    v.push_back(s);
    return v.size() - 1;
  };
  double zmin = 0.0, zmax = 0.0;
  bool first = true;
  for (const auto& c : cells) {
    index_of(rows, c.row);
    index_of(cols, c.col);
    if (!c.defined) continue;
    if (first) {
      zmin = zmax = c.z;
      first = false;
    }
    zmin = std::min(zmin, c.z);
    zmax = std::max(zmax, c.z);
  }
  double denom = zmax - zmin;

  std::string out = open_svg(title, stamp);
  double span_x = kWidth - kMarginLeft - kMarginRight;
  double span_y = kHeight - kMarginTop - kMarginBottom;
  double cw = span_x / std::max<std::size_t>(cols.size(), 1);
  double ch = span_y / std::max<std::size_t>(rows.size(), 1);
  for (const auto& c : cells) {
    double x = kMarginLeft + cw * static_cast<double>(index_of(cols, c.col));
    double y = kMarginTop + ch * static_cast<double>(index_of(rows, c.row));
    std::string fill = "rgb(200,200,200)";
    std::string data;
    if (c.defined) {
      double t = denom > 0.0 ? (c.z - zmin) / denom : 0.5;
      int r = static_cast<int>(std::lround(t * 255.0));
      int b = static_cast<int>(std::lround((1.0 - t) * 255.0));
      fill = "rgb(" + std::to_string(r) + ",64," + std::to_string(b) + ")";
      data = " data-z=\"" + format_double(c.z) + "\"";
    }
    out += "<rect class=\"cell\" x=\"" + num(x + 1) + "\" y=\"" + num(y + 1) +
           "\" width=\"" + num(cw - 2) + "\" height=\"" + num(ch - 2) + "\" fill=\"" +
           fill + "\"" + data + "/>\n";
    if (c.defined)
      out += "<text x=\"" + num(x + cw / 2) + "\" y=\"" + num(y + ch / 2 + 4) +
             "\" font-size=\"10\" text-anchor=\"middle\" fill=\"white\">" +
             num(c.z) + "</text>\n";
  }
  for (std::size_t i = 0; i < rows.size(); ++i)
    out += "<text x=\"" + num(kMarginLeft - 6) + "\" y=\"" +
           num(kMarginTop + ch * (i + 0.5) + 4) +
           "\" font-size=\"10\" text-anchor=\"end\">" + esc(rows[i]) + "</text>\n";
  for (std::size_t i = 0; i < cols.size(); ++i)
    out += x_tick_label(kMarginLeft + cw * (i + 0.5), cols[i]);
  return out + "</svg>\n";
}

}  // namespace aetas::svg
