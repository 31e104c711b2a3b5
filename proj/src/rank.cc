#include "scalenest/rank.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "scalenest/errors.h"

namespace scalenest {

namespace {

// Keeps the weakest rows away from exact zero, where 1/F would blow up.
constexpr double kFloor = 1e-300;

void normalize_mean(std::vector<double>& v) {
  // A constant vector is exactly 1 after normalising; summing can round.
  if (std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end()) {
    std::fill(v.begin(), v.end(), 1.0);
    return;
  }
  double sum = 0.0;
  for (double x : v) sum += x;
  const double scale = static_cast<double>(v.size()) / sum;
  for (double& x : v) x = std::max(x * scale, kFloor);
}

double max_relative_change(const std::vector<double>& prev,
                           const std::vector<double>& next) {
  double worst = 0.0;
  for (std::size_t i = 0; i < prev.size(); ++i)
    worst = std::max(worst, std::abs(next[i] - prev[i]) / prev[i]);
  return worst;
}

std::vector<std::size_t> order_by(const std::vector<double>& score,
                                  const std::vector<std::size_t>& degree,
                                  bool descending) {
  std::vector<std::size_t> order(score.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b])
      return descending ? score[a] > score[b] : score[a] < score[b];
    if (degree[a] != degree[b]) return degree[a] > degree[b];
    return a < b;
  });
  return order;
}

std::vector<std::size_t> row_degrees(const BitMatrix& bits) {
  std::vector<std::size_t> deg(bits.rows(), 0);
  for (std::size_t r = 0; r < bits.rows(); ++r)
    for (auto b : bits.row(r)) deg[r] += b;
  return deg;
}

std::vector<std::size_t> col_degrees(const BitMatrix& bits) {
  std::vector<std::size_t> deg(bits.cols(), 0);
  for (std::size_t r = 0; r < bits.rows(); ++r) {
    auto row = bits.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) deg[c] += row[c];
  }
  return deg;
}

}  // namespace

FitnessResult fitness_complexity(const BinaryMap& map, const FitnessOptions& opts) {
  const auto row_deg = map.row_sums();
  const auto col_deg = map.col_sums();
  for (std::size_t r = 0; r < row_deg.size(); ++r)
    if (row_deg[r] == 0)
      throw PreconditionError(fmt::format("row '{}' is empty; prune first",
                                          map.row_labels[r].str()));
  for (std::size_t c = 0; c < col_deg.size(); ++c)
    if (col_deg[c] == 0)
      throw PreconditionError(fmt::format("column '{}' is empty; prune first",
                                          map.col_labels[c].str()));
  return fitness_complexity(map.bits, opts);
}

FitnessResult fitness_complexity(const BitMatrix& bits, const FitnessOptions& opts) {
  const std::size_t m = bits.rows(), n = bits.cols();
  if (m == 0 || n == 0) throw PreconditionError("fitness of an empty map");
  const auto row_deg = row_degrees(bits);
  const auto col_deg = col_degrees(bits);
  if (std::find(row_deg.begin(), row_deg.end(), 0u) != row_deg.end() ||
      std::find(col_deg.begin(), col_deg.end(), 0u) != col_deg.end())
    throw PreconditionError("map has an empty row or column; prune first");

  // Sparse row lists keep each sweep proportional to the number of ones.
  std::vector<std::vector<std::size_t>> row_ones(m);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (bits(r, c)) row_ones[r].push_back(c);

  FitnessResult res;
  res.fitness.assign(m, 1.0);
  res.complexity.assign(n, 1.0);
  std::vector<double> f(m), inv_sum(n);
  std::vector<std::size_t> prev_rows, prev_cols;
  int stable = 0;

  for (int it = 1; it <= opts.max_iter; ++it) {
    std::fill(inv_sum.begin(), inv_sum.end(), 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      double s = 0.0;
      const double inv_f = 1.0 / res.fitness[r];
      for (std::size_t c : row_ones[r]) {
        s += res.complexity[c];
        inv_sum[c] += inv_f;
      }
      f[r] = s;
    }
    std::vector<double> q(n);
    for (std::size_t c = 0; c < n; ++c) q[c] = 1.0 / inv_sum[c];
    normalize_mean(f);
    normalize_mean(q);

    const double change = std::max(max_relative_change(res.fitness, f),
                                   max_relative_change(res.complexity, q));
    res.fitness = f;
    res.complexity = q;
    res.iterations = it;
    if (change < opts.tol) {
      res.converged = true;
      return res;
    }

    auto rows = order_by(res.fitness, row_deg, true);
    auto cols = order_by(res.complexity, col_deg, false);
    stable = (rows == prev_rows && cols == prev_cols) ? stable + 1 : 0;
    prev_rows = std::move(rows);
    prev_cols = std::move(cols);
    if (stable >= opts.rank_stable_iters) {
      res.converged = true;
      res.rank_stable = true;
      return res;
    }
  }
  return res;
}

BitMatrix pack_bits(const BitMatrix& bits, const FitnessResult& ranks,
                    std::vector<std::size_t>* row_order,
                    std::vector<std::size_t>* col_order) {
  if (ranks.fitness.size() != bits.rows() || ranks.complexity.size() != bits.cols())
    throw ShapeError(fmt::format("ranks for {}x{} applied to a {}x{} map",
                                 ranks.fitness.size(), ranks.complexity.size(),
                                 bits.rows(), bits.cols()));
  auto rows = order_by(ranks.fitness, row_degrees(bits), true);
  auto cols = order_by(ranks.complexity, col_degrees(bits), false);
  BitMatrix out(bits.rows(), bits.cols(), 0);
  for (std::size_t i = 0; i < bits.rows(); ++i) {
    auto src = bits.row(rows[i]);
    auto dst = out.row(i);
    for (std::size_t j = 0; j < bits.cols(); ++j) dst[j] = src[cols[j]];
  }
  if (row_order) *row_order = std::move(rows);
  if (col_order) *col_order = std::move(cols);
  return out;
}

Packed pack_matrix(const BinaryMap& map, const FitnessResult& ranks) {
  Packed out;
  out.map.scale = map.scale;
  out.map.bits = pack_bits(map.bits, ranks, &out.row_order, &out.col_order);
  for (auto r : out.row_order) out.map.row_labels.push_back(map.row_labels[r]);
  for (auto c : out.col_order) out.map.col_labels.push_back(map.col_labels[c]);
  return out;
}

void write_scores_csv(std::ostream& out, const std::vector<CodePath>& labels,
                      const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  out << "label,value\n";
  for (auto i : order) out << labels[i].str() << ',' << fmt::format("{:.17g}", values[i]) << '\n';
}

}  // namespace scalenest
