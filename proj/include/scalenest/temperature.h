#ifndef SCALENEST_TEMPERATURE_H_
#define SCALENEST_TEMPERATURE_H_

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "scalenest/model.h"

namespace scalenest {

// Normalization constant of the temperature scale: T = 100 * U / kUMax.
inline constexpr double kUMax = 0.04145;
inline constexpr double kMinFill = 1e-4;
inline constexpr double kMaxFill = 1.0 - 1e-4;

// Area of {x^p + y^p <= 1} inside the unit square:
//   Gamma(1 + 1/p)^2 / Gamma(1 + 2/p).
double superellipse_area(double p);

// Perfect-nestedness boundary x^p + y^p = 1 whose enclosed area equals the
// matrix fill. x runs along columns, y along rows, both from the top-left
// corner of the packed matrix.
struct Isocline {
  double p = 1.0;
  double fill = 0.5;

  bool Contains(double x, double y) const;
  // y on the curve at abscissa x in [0, 1].
  double YAt(double x) const;
};

// Bisection on ln p over [-8, 8] until |area - fill| < 1e-9. Throws
// DegenerateError when fill lies outside [kMinFill, kMaxFill].
Isocline solve_isocline(double fill);

// Unexpectedness of cell (i, j) of an m x n packed matrix. The cell center
// (x, y) = ((j + .5) / n, (i + .5) / m) is on the wrong side when a presence
// lies outside the isocline or an absence inside it. Wrong-side cells score
// (d / D)^2, where d is the distance to the isocline along direction (1, 1)
// and D the length of that diagonal chord within the unit square.
double unexpectedness(std::size_t i, std::size_t j, bool bit, std::size_t m,
                      std::size_t n, const Isocline& iso);

struct UnexpectedCell {
  std::size_t row = 0;
  std::size_t col = 0;
  double u = 0.0;
};

struct TemperatureReport {
  double temperature = 0.0;
  double fill = 0.0;
  double unexpectedness_sum = 0.0;
  Isocline isocline;
  std::vector<UnexpectedCell> unexpected_cells;  // row-major order
  std::size_t rows = 0;
  std::size_t cols = 0;
};

// Temperature of a packed map, 0 for a perfectly nested layout. Throws
// DegenerateError when the fill is out of range.
TemperatureReport measure_temperature(const BinaryMap& packed);

// Same value as measure_temperature(...).temperature without collecting the
// per-cell list; used inside null ensembles.
double temperature_value(const BitMatrix& packed);

// "# T=...,fill=...,m=...,n=..." then "row_label,col_label,u" lines.
void write_temperature_csv(std::ostream& out, const TemperatureReport& report,
                           const BinaryMap& packed);

}  // namespace scalenest

#endif  // SCALENEST_TEMPERATURE_H_
