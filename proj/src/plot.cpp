#include "topoboost/plot.hpp"

#include <algorithm>
#include <cstdio>

#include "topoboost/error.hpp"
#include "topoboost/formats.hpp"

namespace topoboost::plot {

namespace {

constexpr double kMargin = 48.0;

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Axis annotation text.
std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

PlotSpec fit_plot_spec(std::span<const ph::PersistenceDiagram> diagrams, double eps_max) {
  double top = std::max(eps_max, 0.0);
  for (const auto& d : diagrams) {
    for (const auto& p : d.pairs) {
      top = std::max(top, p.birth);
      if (!p.is_infinite()) top = std::max(top, p.death);
    }
  }
  if (top <= 0.0) top = 1.0;
  PlotSpec spec;
  spec.x_max = spec.y_max = top * 1.05;
  spec.infinity_cap = std::max(eps_max, 0.0) > 0.0 ? eps_max : top;
  return spec;
}

std::string persistence_svg(std::span<const ph::PersistenceDiagram> diagrams, const PlotSpec& spec) {
  if (spec.width <= 0 || spec.height <= 0) throw Error(ErrorCode::InvalidArgument, "plot size must be positive");
  if (!(spec.x_max > spec.x_min) || !(spec.y_max > spec.y_min)) {
    throw Error(ErrorCode::InvalidArgument, "plot ranges must be non-empty");
  }
  const double plot_w = spec.width - 2 * kMargin;
  const double plot_h = spec.height - 2 * kMargin;
  if (plot_w <= 0 || plot_h <= 0) throw Error(ErrorCode::InvalidArgument, "plot too small for its margins");

  auto sx = [&](double x) { return kMargin + (x - spec.x_min) / (spec.x_max - spec.x_min) * plot_w; };
  auto sy = [&](double y) { return spec.height - kMargin - (y - spec.y_min) / (spec.y_max - spec.y_min) * plot_h; };
  auto in_x = [&](double x) { return x >= spec.x_min && x <= spec.x_max; };
  auto in_y = [&](double y) { return y >= spec.y_min && y <= spec.y_max; };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(spec.width) + "\" height=\"" +
         std::to_string(spec.height) + "\" viewBox=\"0 0 " + std::to_string(spec.width) + " " +
         std::to_string(spec.height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Axes and the diagonal y = x, clipped to the shared range.
  svg += "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
  svg += "<line x1=\"" + fixed(sx(spec.x_min)) + "\" y1=\"" + fixed(sy(spec.y_min)) + "\" x2=\"" +
         fixed(sx(spec.x_max)) + "\" y2=\"" + fixed(sy(spec.y_min)) + "\"/>\n";
  svg += "<line x1=\"" + fixed(sx(spec.x_min)) + "\" y1=\"" + fixed(sy(spec.y_min)) + "\" x2=\"" +
         fixed(sx(spec.x_min)) + "\" y2=\"" + fixed(sy(spec.y_max)) + "\"/>\n";
  svg += "</g>\n";
  const double d_lo = std::max(spec.x_min, spec.y_min);
  const double d_hi = std::min(spec.x_max, spec.y_max);
  if (d_hi > d_lo) {
    svg += "<line class=\"diagonal\" x1=\"" + fixed(sx(d_lo)) + "\" y1=\"" + fixed(sy(d_lo)) + "\" x2=\"" +
           fixed(sx(d_hi)) + "\" y2=\"" + fixed(sy(d_hi)) + "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  }
  svg += "<text x=\"" + fixed(spec.width / 2.0) + "\" y=\"" + fixed(spec.height - 12.0) +
         "\" text-anchor=\"middle\" font-size=\"13\">Birth</text>\n";
  svg += "<text x=\"14\" y=\"" + fixed(spec.height / 2.0) + "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 14 " +
         fixed(spec.height / 2.0) + ")\">Death</text>\n";
  svg += "<text x=\"" + fixed(sx(spec.x_max)) + "\" y=\"" + fixed(sy(spec.y_min) + 16) +
         "\" text-anchor=\"end\" font-size=\"11\">" + label(spec.x_max) + "</text>\n";

  bool any_infinite = false;
  for (const auto& d : diagrams) {
    for (const auto& p : d.pairs) any_infinite = any_infinite || p.is_infinite();
  }
  if (any_infinite) {
    if (!in_y(spec.infinity_cap)) throw Error(ErrorCode::InvalidArgument, "infinity cap outside the y range");
    svg += "<line class=\"infinity-cap\" x1=\"" + fixed(sx(spec.x_min)) + "\" y1=\"" + fixed(sy(spec.infinity_cap)) +
           "\" x2=\"" + fixed(sx(spec.x_max)) + "\" y2=\"" + fixed(sy(spec.infinity_cap)) +
           "\" stroke=\"#999\" stroke-dasharray=\"2 2\"/>\n";
    svg += "<text x=\"" + fixed(sx(spec.x_max)) + "\" y=\"" + fixed(sy(spec.infinity_cap) - 4) +
           "\" text-anchor=\"end\" font-size=\"11\">&#8734; (drawn at " + label(spec.infinity_cap) +
           ")</text>\n";
  }

  svg += "<g class=\"pairs\">\n";
  for (const auto& d : diagrams) {
    const MarkerStyle& style = spec.styles.at(std::min<std::size_t>(static_cast<std::size_t>(d.dim), spec.styles.size() - 1));
    for (const auto& p : d.pairs) {
      const double y = p.is_infinite() ? spec.infinity_cap : p.death;
      if (!in_x(p.birth) || !in_y(y)) throw Error(ErrorCode::InvalidArgument, "plot range misses a pair");
      const std::string cls = "pair h" + std::to_string(p.dim) + (p.is_infinite() ? " infinite" : "");
      const std::string data = " data-birth=\"" + formats::format_number(p.birth) + "\" data-death=\"" +
                               formats::format_number(p.death) + "\"";
      const double cx = sx(p.birth);
      const double cy = sy(y);
      if (p.is_infinite()) {
        svg += "<path class=\"" + cls + "\"" + data + " d=\"M " + fixed(cx) + " " + fixed(cy - 5) + " L " +
               fixed(cx + 5) + " " + fixed(cy + 4) + " L " + fixed(cx - 5) + " " + fixed(cy + 4) + " Z\" fill=\"" +
               style.color + "\"><title>H" + std::to_string(p.dim) + " (" + formats::format_number(p.birth) +
               ", inf)</title></path>\n";
      } else if (style.shape == MarkerStyle::Shape::Square) {
        svg += "<rect class=\"" + cls + "\"" + data + " x=\"" + fixed(cx - 3.5) + "\" y=\"" + fixed(cy - 3.5) +
               "\" width=\"7\" height=\"7\" fill=\"" + style.color + "\"/>\n";
      } else {
        svg += "<circle class=\"" + cls + "\"" + data + " cx=\"" + fixed(cx) + "\" cy=\"" + fixed(cy) +
               "\" r=\"4\" fill=\"" + style.color + "\"/>\n";
      }
    }
  }
  svg += "</g>\n";

  svg += "<g class=\"legend\" font-size=\"12\">\n";
  for (std::size_t k = 0; k < 2; ++k) {
    const MarkerStyle& style = spec.styles.at(std::min(k, spec.styles.size() - 1));
    const double lx = kMargin + 10;
    const double ly = kMargin + 10 + 18.0 * static_cast<double>(k);
    if (style.shape == MarkerStyle::Shape::Square) {
      svg += "<rect x=\"" + fixed(lx - 3.5) + "\" y=\"" + fixed(ly - 3.5) + "\" width=\"7\" height=\"7\" fill=\"" +
             style.color + "\"/>\n";
    } else {
      svg += "<circle cx=\"" + fixed(lx) + "\" cy=\"" + fixed(ly) + "\" r=\"4\" fill=\"" + style.color + "\"/>\n";
    }
    svg += "<text x=\"" + fixed(lx + 10) + "\" y=\"" + fixed(ly + 4) + "\">H" + std::to_string(k) + "</text>\n";
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

void emit_persistence_svg(std::span<const ph::PersistenceDiagram> diagrams, const PlotSpec& spec,
                          const std::filesystem::path& path) {
  formats::write_text(path, persistence_svg(diagrams, spec));
}

}  // namespace topoboost::plot
