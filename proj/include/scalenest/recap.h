#ifndef SCALENEST_RECAP_H_
#define SCALENEST_RECAP_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "scalenest/model.h"
#include "scalenest/rank.h"

namespace scalenest {

// Reshuffled Capabilities null sample. For every (row block, column) pair
// the column's bits inside the block are uniformly permuted among the
// block's rows, using a stream keyed by (seed, index, block, column).
// Column sums per block are preserved exactly; row sums move freely within
// blocks. Throws PreconditionError when the map carries no row blocks.
BinaryMap recap_sample(const BinaryMap& map, std::uint64_t seed, std::uint64_t index);

// Bits-only form of recap_sample; `blocks` must partition the rows.
BitMatrix recap_shuffle(const BitMatrix& bits, const std::vector<RowBlock>& blocks,
                        std::uint64_t seed, std::uint64_t index);

struct EnsembleOptions {
  unsigned threads = 1;
  FitnessOptions fitness;
  // Shuffle each row within these column blocks instead of each column
  // within the map's row blocks (the technology-axis variant).
  bool transposed = false;
  std::vector<RowBlock> column_blocks;
};

struct NullEnsemble {
  std::size_t n_samples = 0;
  std::vector<double> temperatures;  // by slot, slot i drawn from sample_indices[i]
  std::vector<std::uint64_t> sample_indices;
  double mean = 0.0;
  double std = 0.0;  // population
  std::uint64_t seed = 0;
  std::size_t degenerate_redraws = 0;
};

// Draws n samples, each re-pruned, re-ranked, re-packed and measured.
// Samples that prune below 2x2 or leave the fill range are redrawn from
// fresh indices n, n+1, ... in slot order. Throws RangeError when n < 2 and
// PathologicalError when redraws exceed n / 2.
NullEnsemble null_ensemble(const BinaryMap& map, std::size_t n, std::uint64_t seed,
                           const EnsembleOptions& opts = {});

struct ZScore {
  double t_empirical = 0.0;
  double z = 0.0;            // NaN when degenerate
  double empirical_p = 1.0;  // (1 + #{samples at least as extreme}) / (n + 1)
  bool degenerate = false;   // null spread is zero
};

ZScore z_score(double t_empirical, const NullEnsemble& ensemble);

// "# mean=...,std=...,seed=...,degenerate_redraws=..." then
// "index,temperature" lines, one per slot.
void write_ensemble_csv(std::ostream& out, const NullEnsemble& ensemble);

}  // namespace scalenest

#endif  // SCALENEST_RECAP_H_
