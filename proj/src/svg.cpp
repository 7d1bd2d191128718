#include "tmine/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace tmine {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

// Round a span to 1/2/5 x 10^k tick steps.
double nice_step(double span, int target_ticks) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / std::max(target_ticks, 1);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  if (r <= 1.0) return mag;
  if (r <= 2.0) return 2.0 * mag;
  if (r <= 5.0) return 5.0 * mag;
  return 10.0 * mag;
}

struct Frame {
  double x0, y0, w, h;       // pixel box
  double xmin, xmax, ymin, ymax;
  double px(double x) const { return x0 + (x - xmin) / (xmax - xmin) * w; }
  double py(double y) const { return y0 + h - (y - ymin) / (ymax - ymin) * h; }
};

void draw_axes(std::string& svg, const Frame& f, const std::string& xlab,
               const std::string& ylab) {
  svg += "<rect x='" + num(f.x0) + "' y='" + num(f.y0) + "' width='" + num(f.w) +
         "' height='" + num(f.h) + "' fill='none' stroke='#333' stroke-width='1'/>\n";
  const double xstep = nice_step(f.xmax - f.xmin, 6);
  for (double t = std::ceil(f.xmin / xstep) * xstep; t <= f.xmax + 1e-9 * xstep;
       t += xstep) {
    const double x = f.px(t);
    svg += "<line x1='" + num(x) + "' y1='" + num(f.y0 + f.h) + "' x2='" + num(x) +
           "' y2='" + num(f.y0 + f.h + 5) + "' stroke='#333'/>\n";
    svg += "<text x='" + num(x) + "' y='" + num(f.y0 + f.h + 18) +
           "' font-size='11' text-anchor='middle'>" + label(t) + "</text>\n";
  }
  const double ystep = nice_step(f.ymax - f.ymin, 5);
  for (double t = std::ceil(f.ymin / ystep) * ystep; t <= f.ymax + 1e-9 * ystep;
       t += ystep) {
    const double y = f.py(t);
    svg += "<line x1='" + num(f.x0 - 5) + "' y1='" + num(y) + "' x2='" + num(f.x0) +
           "' y2='" + num(y) + "' stroke='#333'/>\n";
    svg += "<text x='" + num(f.x0 - 8) + "' y='" + num(y + 4) +
           "' font-size='11' text-anchor='end'>" + label(t) + "</text>\n";
  }
  svg += "<text x='" + num(f.x0 + f.w / 2) + "' y='" + num(f.y0 + f.h + 36) +
         "' font-size='12' text-anchor='middle'>" + escape(xlab) + "</text>\n";
  svg += "<text x='" + num(f.x0 - 48) + "' y='" + num(f.y0 + f.h / 2) +
         "' font-size='12' text-anchor='middle' transform='rotate(-90 " +
         num(f.x0 - 48) + " " + num(f.y0 + f.h / 2) + ")'>" + escape(ylab) +
         "</text>\n";
}

std::string blues(double t) {
  // White to dark blue, clamped linear ramp.
  t = std::clamp(t, 0.0, 1.0);
  const int r = int(std::lround(255.0 + t * (8.0 - 255.0)));
  const int g = int(std::lround(255.0 + t * (48.0 - 255.0)));
  const int b = int(std::lround(255.0 + t * (107.0 - 255.0)));
  char buf[20];
  std::snprintf(buf, sizeof buf, "rgb(%d,%d,%d)", r, g, b);
  return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string svg_open(double w, double h, const std::string& config_hash) {
  return "<svg xmlns='http://www.w3.org/2000/svg' width='" + num(w) +
         "' height='" + num(h) + "' viewBox='0 0 " + num(w) + " " + num(h) +
         "'>\n<!-- config " + config_hash + " -->\n" +
         "<rect width='100%' height='100%' fill='white'/>\n";
}

}  // namespace

std::string svg_curvature_plot(const CurvatureProfile& p,
                               const Eigen::Ref<const Eigen::VectorXd>& sample_positions,
                               const std::string& material,
                               const std::string& config_hash) {
  const double W = 800, H = 460;
  Frame f{70, 50, W - 100, H - 120, p.x.minCoeff(), p.x.maxCoeff(), 0.0, 0.0};
  double kmax = p.kappa.size() ? p.kappa.maxCoeff() : 1.0;
  kmax = std::max({kmax, p.threshold * 1.05, 1e-12});
  f.ymax = kmax * 1.08;

  std::string svg = svg_open(W, H, config_hash);
  svg += "<text x='" + num(W / 2) + "' y='24' font-size='14' text-anchor='middle'>" +
         escape("curvature of log(" + p.element1 + "/" + p.element2 + ") in " +
                material + ", c = " + label(p.c)) +
         "</text>\n";
  draw_axes(svg, f, "position along transect [m]", "kappa");

  // Exceedance bands.
  for (const auto& [lo, hi] : p.x_intervals) {
    svg += "<rect x='" + num(f.px(lo)) + "' y='" + num(f.y0) + "' width='" +
           num(std::max(f.px(hi) - f.px(lo), 0.5)) + "' height='" + num(f.h) +
           "' fill='#cfe2f3' opacity='0.6'/>\n";
  }

  svg += "<polyline fill='none' stroke='#1f2d86' stroke-width='1.5' points='";
  for (Eigen::Index i = 0; i < p.x.size(); ++i) {
    svg += num(f.px(p.x[i])) + "," + num(f.py(p.kappa[i]));
    if (i + 1 < p.x.size()) svg += ' ';
  }
  svg += "'/>\n";

  // Threshold: horizontal dashed line.
  svg += "<line x1='" + num(f.x0) + "' y1='" + num(f.py(p.threshold)) + "' x2='" +
         num(f.x0 + f.w) + "' y2='" + num(f.py(p.threshold)) +
         "' stroke='#555' stroke-dasharray='6 4'/>\n";

  // Predicted mineralization: flagged sample positions on the curve.
  for (int s : p.flagged_samples) {
    if (s < 0 || s >= sample_positions.size()) continue;
    const double pos = sample_positions[s];
    const double u = (pos - f.xmin) / std::max(f.xmax - f.xmin, 1e-300);
    Eigen::Index gi = Eigen::Index(std::lround(u * double(p.kappa.size() - 1)));
    gi = std::clamp<Eigen::Index>(gi, 0, p.kappa.size() - 1);
    svg += "<circle cx='" + num(f.px(pos)) + "' cy='" + num(f.py(p.kappa[gi])) +
           "' r='4' fill='#2166cb' stroke='white' stroke-width='1'/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string svg_heatmap(const CValueMatrix& m, double vmax,
                        const std::string& config_hash) {
  const int d = int(m.element_names.size());
  const double cell = std::clamp(560.0 / std::max(d, 1), 9.0, 34.0);
  const double left = 70, top = 60;
  const double W = left + d * cell + 110;
  const double H = top + d * cell + 50;
  if (!(vmax > 0.0)) vmax = 1.0;

  std::string svg = svg_open(W, H, config_hash);
  svg += "<text x='" + num(W / 2) + "' y='24' font-size='14' text-anchor='middle'>" +
         escape("c-values, " + m.material) + "</text>\n";

  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const std::string fill = (i == j) ? std::string("#f2f2f2")
                                        : blues(m.C(i, j) / vmax);
      svg += "<rect x='" + num(left + j * cell) + "' y='" + num(top + i * cell) +
             "' width='" + num(cell) + "' height='" + num(cell) + "' fill='" +
             fill + "' stroke='#ddd' stroke-width='0.4'/>\n";
    }
  }
  const double fs = std::clamp(cell * 0.55, 6.0, 12.0);
  for (int i = 0; i < d; ++i) {
    svg += "<text x='" + num(left - 5) + "' y='" + num(top + i * cell + cell * 0.7) +
           "' font-size='" + num(fs) + "' text-anchor='end'>" +
           escape(m.element_names[std::size_t(i)]) + "</text>\n";
    svg += "<text x='" + num(left + i * cell + cell / 2) + "' y='" + num(top - 6) +
           "' font-size='" + num(fs) + "' text-anchor='middle'>" +
           escape(m.element_names[std::size_t(i)]) + "</text>\n";
  }

  // Color bar.
  const double bx = left + d * cell + 24, bw = 16, bh = d * cell;
  const int steps = 48;
  for (int s = 0; s < steps; ++s) {
    const double t = 1.0 - double(s) / (steps - 1);
    svg += "<rect x='" + num(bx) + "' y='" + num(top + s * bh / steps) +
           "' width='" + num(bw) + "' height='" + num(bh / steps + 0.5) +
           "' fill='" + blues(t) + "'/>\n";
  }
  svg += "<text x='" + num(bx + bw + 4) + "' y='" + num(top + 10) +
         "' font-size='11'>" + label(vmax) + "</text>\n";
  svg += "<text x='" + num(bx + bw + 4) + "' y='" + num(top + bh) +
         "' font-size='11'>0</text>\n";
  svg += "</svg>\n";
  return svg;
}

std::string svg_comparison(const MaterialComparison& cmp,
                           const std::string& config_hash) {
  const double W = 800, H = 460;
  const int k = int(cmp.c.rows());
  double ymax = 0.0;
  for (int r = 0; r < cmp.c.rows(); ++r)
    for (int m = 0; m < cmp.c.cols(); ++m)
      if (std::isfinite(cmp.c(r, m))) ymax = std::max(ymax, cmp.c(r, m));
  if (!(ymax > 0.0)) ymax = 1.0;

  Frame f{70, 50, W - 240, H - 120, 1.0, double(std::max(k, 2)), 0.0, ymax * 1.08};
  std::string svg = svg_open(W, H, config_hash);
  svg += "<text x='" + num(f.x0 + f.w / 2) +
         "' y='24' font-size='14' text-anchor='middle'>top-ranked c-values per "
         "material</text>\n";
  draw_axes(svg, f, "rank", "c-value");

  for (int m = 0; m < int(cmp.materials.size()); ++m) {
    const std::string color = kPalette[std::size_t(m) % std::size(kPalette)];
    std::string points;
    for (int r = 0; r < k; ++r) {
      if (!std::isfinite(cmp.c(r, m))) break;
      if (!points.empty()) points += ' ';
      points += num(f.px(double(r + 1))) + "," + num(f.py(cmp.c(r, m)));
    }
    svg += "<polyline fill='none' stroke='" + color + "' stroke-width='1.7' points='" +
           points + "'/>\n";
    const double ly = 60.0 + 18.0 * m;
    svg += "<line x1='" + num(W - 150) + "' y1='" + num(ly - 4) + "' x2='" +
           num(W - 128) + "' y2='" + num(ly - 4) + "' stroke='" + color +
           "' stroke-width='2'/>\n";
    svg += "<text x='" + num(W - 122) + "' y='" + num(ly) + "' font-size='12'>" +
           escape(cmp.materials[std::size_t(m)]) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace tmine
