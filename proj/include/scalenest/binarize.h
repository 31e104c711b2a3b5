#ifndef SCALENEST_BINARIZE_H_
#define SCALENEST_BINARIZE_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "scalenest/model.h"

namespace scalenest {

struct RcaConfig {
  double threshold = 1.0;
  void Validate() const;  // throws RangeError unless threshold > 0
};

// Balassa index: (W[c,t] / row_sum[c]) / (col_sum[t] / total). Cells in a
// zero row or zero column get 0. Throws DegenerateError on an all-zero map.
RealMatrix rca_matrix(const WeightedMap& map);

// bit = 1 iff rca >= threshold. Labels and scale come from `source`; row
// blocks group rows by their prefix one geographic level up.
BinaryMap threshold_binarize(const RealMatrix& rca, const WeightedMap& source,
                             const RcaConfig& cfg);

inline BinaryMap binarize(const WeightedMap& map, const RcaConfig& cfg) {
  return threshold_binarize(rca_matrix(map), map, cfg);
}

struct PruningReport {
  std::vector<std::string> removed_rows;
  std::vector<std::string> removed_cols;
  bool empty() const { return removed_rows.empty() && removed_cols.empty(); }
};

struct Pruned {
  BinaryMap map;
  PruningReport report;
};

// Drops all-zero rows and columns. Row blocks are recomputed from
// the surviving rows. Throws DegenerateError if fewer than 2 rows or 2
// columns survive.
Pruned prune_empty(const BinaryMap& map);

// Label-free variant for null samples. Same DegenerateError contract.
BitMatrix prune_bits(const BitMatrix& bits);

// CSV: header of column labels (first cell empty), then one line per row:
// row label followed by "0"/"1" cells.
void write_binary_csv(std::ostream& out, const BinaryMap& map);

// Reads the format written by write_binary_csv. Labels are parsed as dotted
// paths (rows geo, columns tech); scale levels are taken from the label
// depths; a single row block is assigned. Throws ParseError.
BinaryMap read_binary_csv(std::istream& in);

}  // namespace scalenest

#endif  // SCALENEST_BINARIZE_H_
