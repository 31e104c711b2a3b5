#include "scalenest/recap.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>

#include <fmt/format.h>

#include "scalenest/binarize.h"
#include "scalenest/errors.h"
#include "scalenest/parallel.h"
#include "scalenest/random.h"
#include "scalenest/temperature.h"

namespace scalenest {

BitMatrix recap_shuffle(const BitMatrix& bits, const std::vector<RowBlock>& blocks,
                        std::uint64_t seed, std::uint64_t index) {
  BitMatrix out = bits;
  std::vector<std::uint8_t> segment;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const RowBlock& block = blocks[b];
    const std::size_t len = block.size();
    if (len < 2) continue;
    segment.resize(len);
    for (std::size_t c = 0; c < bits.cols(); ++c) {
      std::size_t ones = 0;
      for (std::size_t k = 0; k < len; ++k) {
        segment[k] = bits(block.begin + k, c);
        ones += segment[k];
      }
      if (ones == 0 || ones == len) continue;
      StreamRng rng(derive_key({seed, index, b, c}));
      // Fisher-Yates
      for (std::size_t k = len - 1; k > 0; --k) {
        std::size_t pick = rng.below(k + 1);
        std::swap(segment[k], segment[pick]);
      }
      for (std::size_t k = 0; k < len; ++k) out(block.begin + k, c) = segment[k];
    }
  }
  return out;
}

BinaryMap recap_sample(const BinaryMap& map, std::uint64_t seed, std::uint64_t index) {
  if (map.row_blocks.empty())
    throw PreconditionError("recap sampling needs a row block partition");
  BinaryMap out;
  out.scale = map.scale;
  out.row_labels = map.row_labels;
  out.col_labels = map.col_labels;
  out.row_blocks = map.row_blocks;
  out.bits = recap_shuffle(map.bits, map.row_blocks, seed, index);
  return out;
}

namespace {

// Temperature of one null sample, or nothing when the sample degenerates.
std::optional<double> sample_temperature(const BitMatrix& bits,
                                         const std::vector<RowBlock>& blocks,
                                         std::uint64_t seed, std::uint64_t index,
                                         const EnsembleOptions& opts) {
  BitMatrix shuffled = recap_shuffle(bits, blocks, seed, index);
  if (opts.transposed) shuffled = shuffled.transposed();
  try {
    BitMatrix pruned = prune_bits(shuffled);
    std::size_t ones = 0;
    for (auto b : pruned.values()) ones += b;
    const double fill = static_cast<double>(ones) / static_cast<double>(pruned.size());
    if (fill < kMinFill || fill > kMaxFill) return std::nullopt;
    FitnessResult ranks = fitness_complexity(pruned, opts.fitness);
    return temperature_value(pack_bits(pruned, ranks));
  } catch (const DegenerateError&) {
    return std::nullopt;
  }
}

void check_partition(const std::vector<RowBlock>& blocks, std::size_t n) {
  std::size_t expect = 0;
  for (const auto& b : blocks) {
    if (b.begin != expect || b.end <= b.begin)
      throw PreconditionError("blocks do not partition the matrix");
    expect = b.end;
  }
  if (expect != n) throw PreconditionError("blocks do not cover the matrix");
}

}  // namespace

NullEnsemble null_ensemble(const BinaryMap& map, std::size_t n, std::uint64_t seed,
                           const EnsembleOptions& opts) {
  if (n < 2) throw RangeError(fmt::format("ensemble size must be >= 2, got {}", n));

  BitMatrix bits = opts.transposed ? map.bits.transposed() : map.bits;
  const std::vector<RowBlock>& blocks =
      opts.transposed ? opts.column_blocks : map.row_blocks;
  if (blocks.empty())
    throw PreconditionError(opts.transposed ? "transposed recap needs column blocks"
                                            : "recap sampling needs a row block partition");
  check_partition(blocks, bits.rows());

  NullEnsemble ens;
  ens.n_samples = n;
  ens.seed = seed;
  ens.temperatures.assign(n, 0.0);
  ens.sample_indices.resize(n);
  for (std::size_t i = 0; i < n; ++i) ens.sample_indices[i] = i;

  // Rounds: evaluate every pending slot in parallel, then hand the slots
  // that degenerated fresh indices in slot order.
  std::vector<std::size_t> pending(n);
  for (std::size_t i = 0; i < n; ++i) pending[i] = i;
  std::uint64_t next_index = n;
  while (!pending.empty()) {
    std::vector<std::optional<double>> results(pending.size());
    parallel_for(pending.size(), opts.threads, [&](std::size_t k) {
      results[k] = sample_temperature(bits, blocks, seed,
                                      ens.sample_indices[pending[k]], opts);
    });
    std::vector<std::size_t> retry;
    for (std::size_t k = 0; k < pending.size(); ++k) {
      if (results[k]) {
        ens.temperatures[pending[k]] = *results[k];
      } else {
        retry.push_back(pending[k]);
      }
    }
    ens.degenerate_redraws += retry.size();
    if (2 * ens.degenerate_redraws > n)
      throw PathologicalError(fmt::format(
          "{} of {} null samples degenerated; the null model is ill-posed here",
          ens.degenerate_redraws, n));
    for (auto slot : retry) ens.sample_indices[slot] = next_index++;
    pending = std::move(retry);
  }

  if (std::equal(ens.temperatures.begin() + 1, ens.temperatures.end(),
                 ens.temperatures.begin())) {
    ens.mean = ens.temperatures.front();
    ens.std = 0.0;
    return ens;
  }
  double sum = 0.0;
  for (double t : ens.temperatures) sum += t;
  ens.mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for (double t : ens.temperatures) sq += (t - ens.mean) * (t - ens.mean);
  ens.std = std::sqrt(sq / static_cast<double>(n));
  return ens;
}

ZScore z_score(double t_empirical, const NullEnsemble& ensemble) {
  ZScore z;
  z.t_empirical = t_empirical;
  if (!(ensemble.std > 0.0)) {
    z.degenerate = true;
    z.z = std::numeric_limits<double>::quiet_NaN();
    z.empirical_p = 1.0;
    return z;
  }
  z.z = (t_empirical - ensemble.mean) / ensemble.std;
  const bool lower = t_empirical <= ensemble.mean;
  std::size_t extreme = 0;
  for (double t : ensemble.temperatures)
    if (lower ? t <= t_empirical : t >= t_empirical) ++extreme;
  z.empirical_p = static_cast<double>(1 + extreme) /
                  static_cast<double>(ensemble.temperatures.size() + 1);
  return z;
}

void write_ensemble_csv(std::ostream& out, const NullEnsemble& ensemble) {
  out << fmt::format("# mean={:.17g},std={:.17g},seed={},degenerate_redraws={}\n",
                     ensemble.mean, ensemble.std, ensemble.seed,
                     ensemble.degenerate_redraws);
  out << "index,temperature\n";
  for (std::size_t i = 0; i < ensemble.temperatures.size(); ++i)
    out << ensemble.sample_indices[i] << ','
        << fmt::format("{:.17g}", ensemble.temperatures[i]) << '\n';
}

}  // namespace scalenest
