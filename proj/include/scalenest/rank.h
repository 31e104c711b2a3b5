#ifndef SCALENEST_RANK_H_
#define SCALENEST_RANK_H_

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "scalenest/model.h"

namespace scalenest {

struct FitnessOptions {
  int max_iter = 1000;
  double tol = 1e-8;
  // Number of consecutive iterations with an unchanged rank order after
  // which the ranking is accepted even if the values still drift.
  int rank_stable_iters = 10;
};

struct FitnessResult {
  std::vector<double> fitness;     // per row, mean 1
  std::vector<double> complexity;  // per column, mean 1
  int iterations = 0;
  bool converged = false;     // values or rank order settled
  bool rank_stable = false;   // settled through rank stability only
};

// Fitness-complexity fixed point on a pruned binary map:
//   F'[c] = sum_t M[c,t] Q[t],   Q'[t] = 1 / sum_c M[c,t] / F[c],
// both renormalized to mean 1 after every step, starting from F = Q = 1.
// Stops when the largest relative change of both vectors drops below `tol`,
// or when the rank order has not moved for `rank_stable_iters` iterations.
// Throws PreconditionError on a zero row or column.
FitnessResult fitness_complexity(const BinaryMap& map, const FitnessOptions& opts = {});
FitnessResult fitness_complexity(const BitMatrix& bits, const FitnessOptions& opts = {});

struct Packed {
  BinaryMap map;                   // row_blocks cleared
  std::vector<std::size_t> row_order;  // row_order[k] = source row at position k
  std::vector<std::size_t> col_order;
};

// Rows by descending fitness, columns by ascending complexity; ties go to
// the larger degree, then to the original index. Throws ShapeError when the
// result does not match the map.
Packed pack_matrix(const BinaryMap& map, const FitnessResult& ranks);

// Label-free packing for hot loops; optionally reports the permutations.
BitMatrix pack_bits(const BitMatrix& bits, const FitnessResult& ranks,
                    std::vector<std::size_t>* row_order = nullptr,
                    std::vector<std::size_t>* col_order = nullptr);

// Permutation that packs `map`, ranked with default options.
inline Packed rank_and_pack(const BinaryMap& map, const FitnessOptions& opts = {}) {
  return pack_matrix(map, fitness_complexity(map, opts));
}

// (label,value) lines sorted by value descending, ties in input order.
void write_scores_csv(std::ostream& out, const std::vector<CodePath>& labels,
                      const std::vector<double>& values);

}  // namespace scalenest

#endif  // SCALENEST_RANK_H_
