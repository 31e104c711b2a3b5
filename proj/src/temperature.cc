#include "scalenest/temperature.h"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "scalenest/errors.h"

namespace scalenest {

namespace {

// Reentrant log-gamma from libm; std::lgamma writes the global signgam.
double log_gamma(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

// Root of t -> (x + t)^p + (y + t)^p - 1 on [lo, hi], where the function is
// increasing, to an absolute tolerance of 1e-10.
double diagonal_crossing(double x, double y, double p, double lo, double hi) {
  auto f = [&](double t) { return std::pow(x + t, p) + std::pow(y + t, p) - 1.0; };
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

// Shared by unexpectedness() and the matrix sweeps, with x^p and y^p
// precomputed by the caller.
double wrong_side_score(double x, double y, double xp, double yp, bool bit, double p) {
  const double level = xp + yp;
  const bool inside = level <= 1.0;
  if (bit == inside) return 0.0;
  if (level == 1.0) return 0.0;
  double t;
  if (inside) {
    // Absence inside: the boundary lies toward (1, 1).
    t = diagonal_crossing(x, y, p, 0.0, 1.0 - std::max(x, y));
  } else {
    // Presence outside: the boundary lies back toward the origin.
    t = -diagonal_crossing(x, y, p, -std::min(x, y), 0.0);
  }
  const double chord = 1.0 - std::abs(x - y);  // chord length / sqrt(2)
  const double ratio = std::abs(t) / chord;
  return ratio * ratio;
}

void check_fill(double fill) {
  if (!(fill >= kMinFill && fill <= kMaxFill))
    throw DegenerateError(
        fmt::format("fill {} outside [{}, {}]", fill, kMinFill, kMaxFill));
}

template <typename Visit>
double sweep(const BitMatrix& bits, const Isocline& iso, Visit&& visit) {
  const std::size_t m = bits.rows(), n = bits.cols();
  std::vector<double> xs(n), xp(n);
  for (std::size_t j = 0; j < n; ++j) {
    xs[j] = (static_cast<double>(j) + 0.5) / static_cast<double>(n);
    xp[j] = std::pow(xs[j], iso.p);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double y = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
    const double yp = std::pow(y, iso.p);
    auto row = bits.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double u = wrong_side_score(xs[j], y, xp[j], yp, row[j] != 0, iso.p);
      if (u > 0.0) {
        total += u;
        visit(i, j, u);
      }
    }
  }
  return total;
}

double fill_of(const BitMatrix& bits) {
  std::size_t ones = 0;
  for (auto b : bits.values()) ones += b;
  return bits.empty() ? 0.0
                      : static_cast<double>(ones) / static_cast<double>(bits.size());
}

double to_temperature(double sum, std::size_t m, std::size_t n) {
  return 100.0 * (sum / static_cast<double>(m * n)) / kUMax;
}

}  // namespace

double superellipse_area(double p) {
  return std::exp(2.0 * log_gamma(1.0 + 1.0 / p) - log_gamma(1.0 + 2.0 / p));
}

bool Isocline::Contains(double x, double y) const {
  return std::pow(x, p) + std::pow(y, p) <= 1.0;
}

double Isocline::YAt(double x) const {
  const double rest = 1.0 - std::pow(std::clamp(x, 0.0, 1.0), p);
  return rest <= 0.0 ? 0.0 : std::pow(rest, 1.0 / p);
}

Isocline solve_isocline(double fill) {
  check_fill(fill);
  double lo = -8.0, hi = 8.0;
  double log_p = 0.0;
  for (int it = 0; it < 200; ++it) {
    log_p = 0.5 * (lo + hi);
    const double area = superellipse_area(std::exp(log_p));
    if (std::abs(area - fill) < 1e-9) break;
    if (area < fill) lo = log_p;
    else hi = log_p;
  }
  return Isocline{std::exp(log_p), fill};
}

double unexpectedness(std::size_t i, std::size_t j, bool bit, std::size_t m,
                      std::size_t n, const Isocline& iso) {
  if (i >= m || j >= n)
    throw RangeError(fmt::format("cell ({}, {}) outside a {}x{} matrix", i, j, m, n));
  const double x = (static_cast<double>(j) + 0.5) / static_cast<double>(n);
  const double y = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
  return wrong_side_score(x, y, std::pow(x, iso.p), std::pow(y, iso.p), bit, iso.p);
}

TemperatureReport measure_temperature(const BinaryMap& packed) {
  TemperatureReport rep;
  rep.rows = packed.rows();
  rep.cols = packed.cols();
  rep.fill = fill_of(packed.bits);
  rep.isocline = solve_isocline(rep.fill);
  rep.unexpectedness_sum =
      sweep(packed.bits, rep.isocline, [&](std::size_t i, std::size_t j, double u) {
        rep.unexpected_cells.push_back({i, j, u});
      });
  rep.temperature = to_temperature(rep.unexpectedness_sum, rep.rows, rep.cols);
  return rep;
}

double temperature_value(const BitMatrix& packed) {
  const Isocline iso = solve_isocline(fill_of(packed));
  const double sum = sweep(packed, iso, [](std::size_t, std::size_t, double) {});
  return to_temperature(sum, packed.rows(), packed.cols());
}

void write_temperature_csv(std::ostream& out, const TemperatureReport& report,
                           const BinaryMap& packed) {
  out << fmt::format("# T={:.17g},fill={:.17g},m={},n={}\n", report.temperature,
                     report.fill, report.rows, report.cols);
  out << "row_label,col_label,u\n";
  for (const auto& c : report.unexpected_cells)
    out << packed.row_labels[c.row].str() << ',' << packed.col_labels[c.col].str()
        << ',' << fmt::format("{:.17g}", c.u) << '\n';
}

}  // namespace scalenest
