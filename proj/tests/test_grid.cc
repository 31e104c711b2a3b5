#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "helpers.h"
#include "scalenest/errors.h"
#include "scalenest/grid.h"
#include "scalenest/ingest.h"
#include "scalenest/synth.h"

using namespace testing;

namespace {

std::vector<PatentRecord> mixed_records(std::uint64_t seed) {
  SynthSpec spec;
  spec.regime = Regime::kMixedFrontier;
  spec.seed = seed;
  return gen_records(spec);
}

GridConfig small_config(std::uint64_t seed) {
  GridConfig cfg;
  cfg.n_samples = 200;
  cfg.seed = seed;
  cfg.threads = 4;
  return cfg;
}

ScaleGrid fake_grid(std::vector<double> zs) {
  ScaleGrid g;
  g.geo_depth = 2;
  g.tech_depth = 2;
  std::size_t k = 0;
  for (std::size_t a = 1; a <= 2; ++a)
    for (std::size_t b = 1; b <= 2; ++b) {
      GridCell c;
      c.scale = {a, b};
      c.z.z = zs[k++];
      c.z.degenerate = std::isnan(c.z.z);
      c.degenerate = c.z.degenerate;
      c.n_samples = 10;
      g.cells.emplace(c.scale, c);
    }
  return g;
}

}  // namespace

TEST_CASE("planted multiscale grid") {
  auto records = mixed_records(1);
  auto cfg = small_config(42);
  auto grid = compute_grid(records, cfg);
  REQUIRE(grid.cells.size() == 4);
  CHECK(grid.cells.at({1, 2}).z.z < 0);
  CHECK(grid.cells.at({2, 1}).z.z > 0);
  CHECK(grid.cells.at({2, 2}).z.z < 0);

  std::ostringstream a, b;
  write_grid_csv(a, grid);
  write_grid_csv(b, compute_grid(records, cfg));
  CHECK(a.str() == b.str());

  // A cell does not depend on its neighbours or on the thread count.
  cfg.threads = 1;
  auto finest = build_finest_map(records, cfg.ingest);
  auto alone = compute_cell(finest, {2, 1}, cfg);
  CHECK(alone.z.z == grid.cells.at({2, 1}).z.z);
  CHECK(alone.ensemble->temperatures == grid.cells.at({2, 1}).ensemble->temperatures);

  std::istringstream in(a.str());
  auto back = read_grid_csv(in, 2.0);
  REQUIRE(back.cells.size() == 4);
  CHECK(back.cells.at({2, 2}).z.z == doctest::Approx(grid.cells.at({2, 2}).z.z));
  CHECK(back.cells.at({1, 1}).rows == grid.cells.at({1, 1}).rows);
}

TEST_CASE("degenerate cells are flagged, not thrown") {
  // One region per nation: the (1, t) and (2, t) maps have identity nulls.
  std::vector<PatentRecord> recs = {record("a", {"US.CA"}, {"A.A1"}),
                                    record("b", {"FR.PA"}, {"B.B1"}),
                                    record("c", {"DE.BE"}, {"A.A1", "B.B1"})};
  auto cfg = small_config(1);
  auto grid = compute_grid(recs, cfg);
  CHECK(grid.cells.size() == 4);
  auto f = extract_frontier(grid);
  CHECK(f.degenerate.size() + f.nested.size() + f.antinested.size() + f.insignificant.size() ==
        4);
  for (const auto& [scale, cell] : grid.cells)
    if (cell.degenerate) CHECK_FALSE(cell.note.empty());
  std::ostringstream out;
  write_grid_csv(out, grid);
  CHECK(out.str().rfind(
            "geo_level,tech_level,rows,cols,fill,T_emp,null_mean,null_std,z,p_emp,n_samples,"
            "degenerate\n",
            0) == 0);

  CHECK_THROWS_AS(compute_grid({}, cfg), InputError);
  cfg.n_samples = 1;
  CHECK_THROWS_AS(compute_grid(recs, cfg), RangeError);
}

TEST_CASE("frontier classification") {
  auto quiet = extract_frontier(fake_grid({0.5, -1.0, 1.9, -1.99}));
  CHECK(quiet.insignificant.size() == 4);
  CHECK(quiet.nested.empty());
  CHECK(quiet.antinested.empty());

  auto f = extract_frontier(fake_grid({-3, -2.5, 2.5, 3}));
  CHECK(f.nested == std::vector<ScalePair>{{1, 1}, {1, 2}});
  CHECK(f.antinested == std::vector<ScalePair>{{2, 1}, {2, 2}});

  auto d = extract_frontier(fake_grid({-3, std::numeric_limits<double>::quiet_NaN(), 2.5, 0}));
  CHECK(d.degenerate == std::vector<ScalePair>{{1, 2}});
  CHECK(d.nested.size() == 1);
  CHECK(d.antinested.size() == 1);

  // Raising the threshold keeps insignificant cells insignificant.
  auto g = fake_grid({0.5, -1.0, 1.9, -3});
  auto before = extract_frontier(g).insignificant;
  g.significance_threshold = 3.5;
  auto after = extract_frontier(g).insignificant;
  for (auto& s : before) CHECK(std::find(after.begin(), after.end(), s) != after.end());
}

TEST_CASE("cell seeds depend only on the run seed and the pair") {
  CHECK(cell_seed(1, {1, 2}) == cell_seed(1, {1, 2}));
  CHECK(cell_seed(1, {1, 2}) != cell_seed(1, {2, 1}));
  CHECK(cell_seed(1, {1, 2}) != cell_seed(2, {1, 2}));
}

TEST_CASE("grid csv rejects malformed files") {
  std::istringstream wrong("a,b\n");
  CHECK_THROWS_AS(read_grid_csv(wrong), ParseError);
  std::istringstream short_row(
      "geo_level,tech_level,rows,cols,fill,T_emp,null_mean,null_std,z,p_emp,n_samples,"
      "degenerate\n1,1,2\n");
  CHECK_THROWS_AS(read_grid_csv(short_row), ParseError);
}
