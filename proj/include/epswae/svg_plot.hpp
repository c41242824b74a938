#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "epswae/dense_matrix.hpp"
#include "epswae/errors.hpp"

namespace epswae {

namespace detail {

struct PanelBounds {
  double xlo = 0, xhi = 1, ylo = 0, yhi = 1;

  void include(double x, double y, bool first) {
    if (first) {
      xlo = xhi = x;
      ylo = yhi = y;
      return;
    }
    xlo = std::min(xlo, x);
    xhi = std::max(xhi, x);
    ylo = std::min(ylo, y);
    yhi = std::max(yhi, y);
  }

  void pad() {
    const double px = 0.05 * std::max(xhi - xlo, 1e-9);
    const double py = 0.05 * std::max(yhi - ylo, 1e-9);
    xlo -= px;
    xhi += px;
    ylo -= py;
    yhi += py;
  }
};

}  // namespace detail

/// Minimal static scatter of latent samples: two orthographic panels (axes
/// 0-1, "top view", and 0-2, "side view"), posterior and prior as dots, the
/// interpolation path as a polyline. Fixed viewport, no interactivity.
inline void write_latent_scatter_svg(const std::filesystem::path& path,
                                     const PointCloud& posterior,
                                     const PointCloud& prior,
                                     const PointCloud& interp_path) {
  const double panel_w = 440, panel_h = 420, margin = 20;
  const int axes[2][2] = {{0, 1}, {0, 2}};

  auto coord = [](const PointCloud& pts, std::size_t i, int axis) {
    return axis < static_cast<int>(pts.cols()) ? pts(i, axis) : 0.0;
  };

  std::string svg;
  char buf[256];
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"920\" height=\"460\" "
         "viewBox=\"0 0 920 460\">\n<rect width=\"920\" height=\"460\" fill=\"white\"/>\n";
  for (int panel = 0; panel < 2; ++panel) {
    const int ax = axes[panel][0], ay = axes[panel][1];
    detail::PanelBounds b;
    bool first = true;
    for (const PointCloud* pts : {&posterior, &prior, &interp_path})
      for (std::size_t i = 0; i < pts->rows(); ++i) {
        b.include(coord(*pts, i, ax), coord(*pts, i, ay), first);
        first = false;
      }
    if (first) continue;  // nothing to draw
    b.pad();
    const double x0 = margin + panel * (panel_w + margin);
    auto sx = [&](double v) {
      return x0 + (v - b.xlo) / (b.xhi - b.xlo) * panel_w;
    };
    auto sy = [&](double v) {
      return margin + panel_h - (v - b.ylo) / (b.yhi - b.ylo) * panel_h;
    };
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" "
                  "fill=\"none\" stroke=\"#999\"/>\n",
                  x0, margin, panel_w, panel_h);
    svg += buf;
    struct Series {
      const PointCloud* pts;
      const char* color;
      double r;
    };
    for (const Series& s : {Series{&posterior, "#4477cc", 1.6},
                            Series{&prior, "#33aa55", 1.6}}) {
      for (std::size_t i = 0; i < s.pts->rows(); ++i) {
        std::snprintf(buf, sizeof buf,
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"%.1f\" fill=\"%s\" "
                      "fill-opacity=\"0.5\"/>\n",
                      sx(coord(*s.pts, i, ax)), sy(coord(*s.pts, i, ay)), s.r, s.color);
        svg += buf;
      }
    }
    if (interp_path.rows() > 1) {
      svg += "<polyline fill=\"none\" stroke=\"#cc3333\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < interp_path.rows(); ++i) {
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", sx(coord(interp_path, i, ax)),
                      sy(coord(interp_path, i, ay)));
        svg += buf;
      }
      svg += "\"/>\n";
    }
  }
  svg += "</svg>\n";
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << svg;
  if (!f) throw IoError("write failed: " + path.string());
}

}  // namespace epswae
