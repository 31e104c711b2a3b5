#ifndef SCALENEST_GRID_H_
#define SCALENEST_GRID_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scalenest/binarize.h"
#include "scalenest/ingest.h"
#include "scalenest/model.h"
#include "scalenest/recap.h"

namespace scalenest {

struct GridConfig {
  IngestConfig ingest;
  RcaConfig rca;
  std::size_t n_samples = 1000;
  std::uint64_t seed = 0;
  double significance = 2.0;  // in standard deviations
  unsigned threads = 1;
  FitnessOptions fitness;
  // Shuffle within technology-parent column blocks instead of geographic
  // row blocks.
  bool transposed = false;

  void Validate() const;
};

struct GridCell {
  ScalePair scale;
  std::size_t rows = 0;  // after pruning
  std::size_t cols = 0;
  double fill = 0.0;
  double t_empirical = 0.0;
  double null_mean = 0.0;
  double null_std = 0.0;
  ZScore z;
  std::size_t n_samples = 0;
  bool degenerate = false;
  std::string note;  // why a degenerate cell could not be scored
  std::optional<NullEnsemble> ensemble;
};

struct ScaleGrid {
  std::size_t geo_depth = 0;
  std::size_t tech_depth = 0;
  double significance_threshold = 2.0;
  std::map<ScalePair, GridCell> cells;
};

// Seed of the null ensemble at one scale pair; depends only on the run seed
// and the pair, so any subset of cells reproduces.
std::uint64_t cell_seed(std::uint64_t run_seed, const ScalePair& scale);

// Scores one scale pair from the finest weighted map. Degenerate situations
// (empty map after binarization, out-of-range fill, zero null spread,
// pathological ensemble) are flagged on the cell rather than thrown.
GridCell compute_cell(const WeightedMap& finest, const ScalePair& scale,
                      const GridConfig& cfg);

// Every (geo, tech) pair up to the configured finest levels. Throws
// InputError when no records are given.
ScaleGrid compute_grid(const std::vector<PatentRecord>& records, const GridConfig& cfg);

struct Frontier {
  std::vector<ScalePair> nested;         // z <= -threshold
  std::vector<ScalePair> antinested;     // z >= +threshold
  std::vector<ScalePair> insignificant;  // |z| < threshold
  std::vector<ScalePair> degenerate;     // excluded from the three sets
};

Frontier extract_frontier(const ScaleGrid& grid);

// Columns: geo_level,tech_level,rows,cols,fill,T_emp,null_mean,null_std,z,
// p_emp,n_samples,degenerate. Unavailable values are left empty.
void write_grid_csv(std::ostream& out, const ScaleGrid& grid);
ScaleGrid read_grid_csv(std::istream& in, double significance_threshold = 2.0);

}  // namespace scalenest

#endif  // SCALENEST_GRID_H_
