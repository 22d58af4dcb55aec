#include "vinecop/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "vinecop/error.hpp"

namespace vinecop {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<std::size_t> thinned_rows(std::size_t rows, std::size_t max_points) {
  std::vector<std::size_t> out;
  if (rows <= max_points || max_points == 0) {
    for (std::size_t i = 0; i < rows; ++i) out.push_back(i);
    return out;
  }
  for (std::size_t k = 0; k < max_points; ++k) out.push_back(k * rows / max_points);
  return out;
}

}  // namespace

std::string scatter_matrix_svg(const DataMatrix& points, const DataMatrix* overlay,
                               const ScatterOptions& options) {
  const std::size_t d = points.cols();
  if (d == 0) throw Error(ErrorCode::InvalidArgument, "scatter matrix needs at least one column");
  if (overlay && overlay->names() != points.names()) {
    throw Error(ErrorCode::InvalidArgument, "overlay columns do not match the sample columns");
  }

  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  auto widen = [&](const DataMatrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < d; ++j) {
        if (!std::isfinite(m(i, j))) continue;
        lo[j] = std::min(lo[j], m(i, j));
        hi[j] = std::max(hi[j], m(i, j));
      }
  };
  widen(points);
  if (overlay) widen(*overlay);
  for (std::size_t j = 0; j < d; ++j) {
    if (!(lo[j] < hi[j])) {
      const double c = std::isfinite(lo[j]) ? lo[j] : 0.0;
      lo[j] = c - 0.5;
      hi[j] = c + 0.5;
    }
  }

  const double cell = options.cell, pad = 6.0, margin = 10.0;
  const double size = 2.0 * margin + cell * static_cast<double>(d);
  auto px = [&](std::size_t j, double v) {
    return margin + cell * static_cast<double>(j) + pad + (v - lo[j]) / (hi[j] - lo[j]) * (cell - 2 * pad);
  };
  auto py = [&](std::size_t i, double v) {
    return margin + cell * static_cast<double>(i + 1) - pad - (v - lo[i]) / (hi[i] - lo[i]) * (cell - 2 * pad);
  };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(size) + "\" height=\"" + fmt(size) +
       "\" viewBox=\"0 0 " + fmt(size) + " " + fmt(size) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double x0 = margin + cell * static_cast<double>(j), y0 = margin + cell * static_cast<double>(i);
      s += "<rect x=\"" + fmt(x0) + "\" y=\"" + fmt(y0) + "\" width=\"" + fmt(cell) + "\" height=\"" +
           fmt(cell) + "\" fill=\"none\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
      if (i == j) {
        s += "<text x=\"" + fmt(x0 + cell / 2) + "\" y=\"" + fmt(y0 + cell / 2) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
             escape(points.name(i)) + "</text>\n";
        s += "<text x=\"" + fmt(x0 + 4) + "\" y=\"" + fmt(y0 + cell - 4) +
             "\" font-family=\"sans-serif\" font-size=\"9\">" + fmt(lo[i]) + "</text>\n";
        s += "<text x=\"" + fmt(x0 + cell - 4) + "\" y=\"" + fmt(y0 + 12) +
             "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"9\">" + fmt(hi[i]) + "</text>\n";
      }
    }
  }
  if (overlay) {
    s += "<g fill=\"#b0b0b0\">\n";
    for (const std::size_t r : thinned_rows(overlay->rows(), options.max_points)) {
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
          if (i == j) continue;
          const double xv = (*overlay)(r, j), yv = (*overlay)(r, i);
          if (!std::isfinite(xv) || !std::isfinite(yv)) continue;
          s += "<circle cx=\"" + fmt(px(j, xv)) + "\" cy=\"" + fmt(py(i, yv)) + "\" r=\"1.2\"/>\n";
        }
    }
    s += "</g>\n";
  }
  s += "<path stroke=\"#1f3f9f\" stroke-width=\"0.6\" fill=\"none\" d=\"";
  for (const std::size_t r : thinned_rows(points.rows(), options.max_points)) {
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        if (i == j) continue;
        const double xv = points(r, j), yv = points(r, i);
        if (!std::isfinite(xv) || !std::isfinite(yv)) continue;
        const double cx = px(j, xv), cy = py(i, yv);
        s += "M" + fmt(cx - 1.5) + " " + fmt(cy) + "h3M" + fmt(cx) + " " + fmt(cy - 1.5) + "v3";
      }
  }
  s += "\"/>\n</svg>\n";
  return s;
}

}  // namespace vinecop
