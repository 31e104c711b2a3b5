#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "scalenest/cli.h"
#include "scalenest/errors.h"

namespace scalenest {

namespace {

constexpr int kCellW = 90;
constexpr int kCellH = 60;
constexpr int kLeft = 80;
constexpr int kTop = 50;

constexpr const char* kBlue = "#2166ac";
constexpr const char* kRed = "#b2182b";
constexpr const char* kGrey = "#bdbdbd";

}  // namespace

std::string render_heatmap(const ScaleGrid& grid) {
  const int w = kLeft + static_cast<int>(grid.tech_depth) * kCellW + 10;
  const int h = kTop + static_cast<int>(grid.geo_depth) * kCellH + 10;
  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{1}\" fill=\"#ffffff\"/>\n",
      w, h);
  s += fmt::format("<text x=\"{}\" y=\"18\" text-anchor=\"middle\">technology level</text>\n",
                   kLeft + static_cast<int>(grid.tech_depth) * kCellW / 2);
  for (std::size_t t = 1; t <= grid.tech_depth; ++t)
    s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                     kLeft + static_cast<int>(t - 1) * kCellW + kCellW / 2, kTop - 8, t);
  for (std::size_t g = 1; g <= grid.geo_depth; ++g)
    s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">geo {}</text>\n", kLeft - 8,
                     kTop + static_cast<int>(g - 1) * kCellH + kCellH / 2 + 4, g);

  for (const auto& [scale, cell] : grid.cells) {
    const int x = kLeft + static_cast<int>(scale.tech_level - 1) * kCellW;
    const int y = kTop + static_cast<int>(scale.geo_level - 1) * kCellH;
    const double z = cell.z.z;
    const bool grey = cell.degenerate || cell.z.degenerate || std::isnan(z);
    std::string fill = kGrey;
    double opacity = 1.0;
    if (!grey) {
      fill = z < 0 ? kBlue : kRed;
      opacity = std::min(std::fabs(z), 5.0) / 5.0;
    }
    s += fmt::format(
        "<rect class=\"cell\" data-geo=\"{}\" data-tech=\"{}\" x=\"{}\" y=\"{}\" "
        "width=\"{}\" height=\"{}\" fill=\"{}\" fill-opacity=\"{:.3f}\" "
        "stroke=\"#606060\" stroke-width=\"1\"/>\n",
        scale.geo_level, scale.tech_level, x, y, kCellW, kCellH, fill, opacity);
    const std::string label = grey ? std::string("n/a") : fmt::format("z={:.2f}", z);
    s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                     x + kCellW / 2, y + kCellH / 2 + 4, label);
  }
  s += "</svg>\n";
  return s;
}

std::string render_portrait(const BinaryMap& packed, const Isocline& iso) {
  if (packed.rows() == 0 || packed.cols() == 0 || packed.ones() == 0)
    throw PreconditionError("portrait needs a pruned map with at least one presence");
  constexpr double kSide = 400.0;
  constexpr double kPad = 10.0;
  const double m = static_cast<double>(packed.rows());
  const double n = static_cast<double>(packed.cols());
  // Dots shrink with the larger dimension but stay visible.
  const double r = std::max(0.6, 0.35 * kSide / std::max(m, n));

  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" "
      "viewBox=\"0 0 {0} {0}\">\n"
      "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{0}\" fill=\"#ffffff\"/>\n"
      "<rect x=\"{1}\" y=\"{1}\" width=\"{2}\" height=\"{2}\" fill=\"none\" "
      "stroke=\"#606060\"/>\n",
      kSide + 2 * kPad, kPad, kSide);
  for (std::size_t i = 0; i < packed.rows(); ++i)
    for (std::size_t j = 0; j < packed.cols(); ++j) {
      if (!packed.bits(i, j)) continue;
      const double x = (static_cast<double>(j) + 0.5) / n;
      const double y = (static_cast<double>(i) + 0.5) / m;
      s += fmt::format("<circle class=\"dot\" cx=\"{:.4f}\" cy=\"{:.4f}\" r=\"{:.3f}\" "
                       "fill=\"#222222\"/>\n",
                       kPad + x * kSide, kPad + y * kSide, r);
    }
  s += "<polyline class=\"isocline\" fill=\"none\" stroke=\"#b2182b\" stroke-width=\"1.5\" "
       "points=\"";
  constexpr int kSamples = 256;
  for (int k = 0; k < kSamples; ++k) {
    const double x = static_cast<double>(k) / (kSamples - 1);
    const double y = iso.YAt(x);
    s += fmt::format("{}{:.4f},{:.4f}", k ? " " : "", kPad + x * kSide, kPad + y * kSide);
  }
  s += "\"/>\n</svg>\n";
  return s;
}

}  // namespace scalenest
