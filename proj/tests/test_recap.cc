#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "helpers.h"
#include "oracles.h"
#include "scalenest/binarize.h"
#include "scalenest/errors.h"
#include "scalenest/ingest.h"
#include "scalenest/rank.h"
#include "scalenest/recap.h"
#include "scalenest/synth.h"
#include "scalenest/temperature.h"

using namespace testing;

namespace {

BinaryMap with_blocks(BitMatrix b, std::vector<RowBlock> blocks) {
  BinaryMap m = make_binary_map(std::move(b));
  m.row_blocks = std::move(blocks);
  return m;
}

std::vector<RowBlock> even_blocks(std::size_t rows, std::size_t count) {
  std::vector<RowBlock> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back({k * rows / count, (k + 1) * rows / count});
  return out;
}

std::vector<std::size_t> block_col_sums(const BitMatrix& b, const RowBlock& blk) {
  std::vector<std::size_t> s(b.cols(), 0);
  for (std::size_t i = blk.begin; i < blk.end; ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) s[j] += b(i, j);
  return s;
}

// Planted map at (geo 2, tech 2), pruned, with parent blocks.
BinaryMap planted(Regime regime, std::size_t parents, std::size_t children,
                  std::size_t tech_parents, std::size_t tech_children, std::uint64_t seed) {
  SynthSpec spec;
  spec.regime = regime;
  spec.n_parents = parents;
  spec.children_per_parent = children;
  spec.n_tech_parents = tech_parents;
  spec.tech_children_per_parent = tech_children;
  spec.seed = seed;
  return prune_empty(binarize(build_finest_map(gen_records(spec), IngestConfig{}), {})).map;
}

double pipeline_temperature(const BitMatrix& b) {
  return temperature_value(pack_bits(b, fitness_complexity(b)));
}

}  // namespace

TEST_CASE("trivial segments stay put") {
  auto m = with_blocks(bits({{1, 0, 1}, {0, 1, 1}, {1, 1, 0}}), {{0, 1}, {1, 2}, {2, 3}});
  for (std::uint64_t k = 0; k < 20; ++k) CHECK(recap_sample(m, 5, k).bits == m.bits);

  auto full = with_blocks(bits({{1, 0}, {1, 1}, {1, 0}}), {{0, 3}});
  for (std::uint64_t k = 0; k < 50; ++k) {
    auto s = recap_sample(full, 9, k).bits;
    CHECK(s(0, 0) == 1);
    CHECK(s(1, 0) == 1);
    CHECK(s(2, 0) == 1);
  }
  BinaryMap no_blocks = make_binary_map(bits({{1, 0}, {0, 1}}));
  no_blocks.row_blocks.clear();
  CHECK_THROWS_AS(recap_sample(no_blocks, 1, 0), PreconditionError);
}

TEST_CASE("two-row segment is a fair coin") {
  auto m = with_blocks(bits({{1}, {0}}), {{0, 2}});
  int top = 0;
  for (std::uint64_t k = 0; k < 10000; ++k) {
    auto s = recap_sample(m, 77, k).bits;
    CHECK(s(0, 0) + s(1, 0) == 1);
    top += s(0, 0);
  }
  CHECK(std::fabs(top / 10000.0 - 0.5) <= 0.02);
}

TEST_CASE("column sums survive every sample") {
  std::mt19937_64 rng(41);
  auto b = oracle::random_bits(60, 40, 0.3, rng);
  auto blocks = even_blocks(60, 6);
  auto m = with_blocks(b, blocks);
  auto global = m.col_sums();
  std::vector<std::vector<std::size_t>> per_block;
  for (auto& blk : blocks) per_block.push_back(block_col_sums(b, blk));
  bool changed = false;
  for (std::uint64_t k = 0; k < 1000; ++k) {
    auto s = recap_sample(m, 3, k);
    CHECK(s.col_sums() == global);
    CHECK(s.ones() == m.ones());
    for (std::size_t q = 0; q < blocks.size(); ++q)
      CHECK(block_col_sums(s.bits, blocks[q]) == per_block[q]);
    changed = changed || s.bits != b;
  }
  CHECK(changed);
}

TEST_CASE("a single block is a plain fixed-column-sum shuffle") {
  std::mt19937_64 rng(43);
  auto b = oracle::random_bits(12, 6, 0.4, rng);
  auto m = with_blocks(b, {{0, 12}});
  // Each cell of column j is a presence with probability colsum_j / 12.
  std::vector<double> hits(12 * 6, 0.0);
  const int n = 4000;
  for (int k = 0; k < n; ++k) {
    auto s = recap_sample(m, 1, k).bits;
    for (std::size_t c = 0; c < s.size(); ++c) hits[c] += s.values()[c];
  }
  auto sums = m.col_sums();
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      CHECK(std::fabs(hits[i * 6 + j] / n - sums[j] / 12.0) < 0.04);
}

TEST_CASE("ensembles are deterministic across threads and runs") {
  auto m = planted(Regime::kInheritedDiversification, 4, 5, 3, 4, 2);
  EnsembleOptions one, many;
  one.threads = 1;
  many.threads = 6;
  auto a = null_ensemble(m, 300, 99, one);
  auto b = null_ensemble(m, 300, 99, many);
  CHECK(a.temperatures == b.temperatures);
  CHECK(a.sample_indices == b.sample_indices);
  CHECK(a.mean == b.mean);
  CHECK(a.std == b.std);

  std::ostringstream x, y;
  write_ensemble_csv(x, null_ensemble(m, 2, 5, one));
  write_ensemble_csv(y, null_ensemble(m, 2, 5, one));
  CHECK(x.str() == y.str());
  CHECK(x.str().rfind("# mean=", 0) == 0);

  // A sample is a function of (seed, index) only.
  CHECK(recap_sample(m, 99, 17).bits == recap_sample(m, 99, 17).bits);
  CHECK_THROWS_AS(null_ensemble(m, 1, 5, one), RangeError);
}

TEST_CASE("identity null model has zero spread") {
  auto m = with_blocks(bits({{1, 1, 1}, {1, 1, 0}, {0, 1, 0}}), {{0, 1}, {1, 2}, {2, 3}});
  auto ens = null_ensemble(m, 50, 1, {});
  CHECK(ens.std == 0.0);
  auto z = z_score(ens.mean, ens);
  CHECK(z.degenerate);
  CHECK(std::isnan(z.z));
}

TEST_CASE("ill-posed null models are reported") {
  // Half the shuffles of this map collapse to a single row.
  auto m = with_blocks(bits({{1, 0}, {0, 1}}), {{0, 2}});
  CHECK_THROWS_AS(null_ensemble(m, 200, 4, {}), PathologicalError);
}

TEST_CASE("transposed shuffling needs column blocks") {
  auto m = planted(Regime::kInheritedDiversification, 4, 4, 3, 4, 1);
  EnsembleOptions opts;
  opts.transposed = true;
  CHECK_THROWS_AS(null_ensemble(m, 10, 1, opts), PreconditionError);
  opts.column_blocks = blocks_from_labels(m.col_labels, 1);
  auto a = null_ensemble(m, 40, 1, opts);
  auto b = null_ensemble(m, 40, 1, opts);
  CHECK(a.temperatures == b.temperatures);
}

TEST_CASE("z scores") {
  NullEnsemble ens;
  ens.temperatures = {48, 50, 52};
  ens.mean = 50;
  ens.std = 2;
  CHECK(z_score(50, ens).z == 0.0);
  auto z = z_score(44, ens);
  CHECK(z.z == doctest::Approx(-3.0));
  CHECK(z.empirical_p == doctest::Approx(0.25));
  CHECK_FALSE(z.degenerate);
  CHECK(z_score(53, ens).empirical_p == doctest::Approx(0.25));
  CHECK(z_score(52, ens).empirical_p == doctest::Approx(0.5));
  ens.std = 0;
  CHECK(z_score(44, ens).degenerate);
}

TEST_CASE("planted nestedness sits below its null") {
  auto m = planted(Regime::kInheritedDiversification, 6, 10, 4, 8, 0);
  const double t = measure_temperature(rank_and_pack(m).map).temperature;
  auto ens = null_ensemble(m, 200, 7, {});
  CHECK(ens.mean > t);
}

TEST_CASE("exhaustive enumeration on a reduced instance") {
  // 3 parents x 3 children x 6 technologies. Every distinct arrangement of a
  // block-column segment is equally likely, so the exact null mean is the
  // average over the Cartesian product of arrangements. Packing makes the
  // temperature blind to the order of rows, so each block is enumerated up
  // to row relabelling: its arrangements are grouped by their sorted rows
  // and each group carries its multiplicity.
  for (Regime regime : {Regime::kInheritedDiversification, Regime::kDisjointSpecialization}) {
    const BinaryMap m = planted(regime, 3, 3, 2, 3, 3);
    using Rows = std::vector<std::vector<std::uint8_t>>;
    std::vector<std::vector<std::pair<Rows, double>>> per_block;
    double total_arrangements = 1;
    for (const auto& blk : m.row_blocks) {
      const std::size_t len = blk.size();
      std::vector<std::vector<std::vector<std::uint8_t>>> options(m.cols());
      for (std::size_t c = 0; c < m.cols(); ++c) {
        std::vector<std::uint8_t> seg;
        for (std::size_t i = blk.begin; i < blk.end; ++i) seg.push_back(m.bits(i, c));
        std::sort(seg.begin(), seg.end());
        do options[c].push_back(seg);
        while (std::next_permutation(seg.begin(), seg.end()));
      }
      std::map<Rows, double> groups;
      std::vector<std::size_t> odo(m.cols(), 0);
      while (true) {
        Rows rows(len, std::vector<std::uint8_t>(m.cols()));
        for (std::size_t c = 0; c < m.cols(); ++c)
          for (std::size_t r = 0; r < len; ++r) rows[r][c] = options[c][odo[c]][r];
        std::sort(rows.begin(), rows.end());
        groups[rows] += 1;
        std::size_t k = 0;
        while (k < odo.size() && ++odo[k] == options[k].size()) odo[k++] = 0;
        if (k == odo.size()) break;
      }
      double count = 0;
      for (auto& g : groups) count += g.second;
      total_arrangements *= count;
      per_block.emplace_back(groups.begin(), groups.end());
    }
    double combos = 1;
    for (auto& b : per_block) combos *= static_cast<double>(b.size());
    INFO(RegimeName(regime) << ": " << total_arrangements << " arrangements in " << combos
                            << " classes");
    REQUIRE(combos <= 2.5e6);

    // One sweep per class of the first block.
    auto sweep = [&](std::size_t first) {
      std::pair<double, double> acc{0, 0};
      std::vector<std::size_t> odo(per_block.size(), 0);
      odo[0] = first;
      while (true) {
        BitMatrix b(m.rows(), m.cols(), 0);
        double w = 1;
        for (std::size_t q = 0; q < per_block.size(); ++q) {
          const auto& [rows, mult] = per_block[q][odo[q]];
          w *= mult;
          for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t c = 0; c < m.cols(); ++c)
              b(m.row_blocks[q].begin + r, c) = rows[r][c];
        }
        try {
          auto p = prune_bits(b);
          std::size_t ones = 0;
          for (auto v : p.values()) ones += v;
          const double f = static_cast<double>(ones) / p.size();
          if (f >= kMinFill && f <= kMaxFill) {
            acc.first += w * pipeline_temperature(p);
            acc.second += w;
          }
        } catch (const DegenerateError&) {
        }
        std::size_t k = 1;
        while (k < odo.size() && ++odo[k] == per_block[k].size()) odo[k++] = 0;
        if (k >= odo.size()) break;
      }
      return acc;
    };
    double weighted_sum = 0, weight = 0;
    for (std::size_t i = 0; i < per_block[0].size(); ++i) {
      auto [s, w] = sweep(i);
      weighted_sum += s;
      weight += w;
    }
    REQUIRE(weight > 0);
    const double exact_mean = weighted_sum / weight;
    const double t = pipeline_temperature(rank_and_pack(m).map.bits);
    INFO("empirical T " << t << ", exact null mean " << exact_mean);
    if (regime == Regime::kInheritedDiversification) CHECK(exact_mean > t);
    else CHECK(exact_mean < t);

    auto ens = null_ensemble(m, 2000, 11, {});
    CHECK(std::fabs(ens.mean - exact_mean) < 4 * ens.std / std::sqrt(2000.0) + 1e-9);
  }
}
