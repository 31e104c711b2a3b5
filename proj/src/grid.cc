#include "scalenest/grid.h"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "scalenest/errors.h"
#include "scalenest/random.h"
#include "scalenest/rank.h"
#include "scalenest/temperature.h"

namespace scalenest {

void GridConfig::Validate() const {
  ingest.Validate();
  rca.Validate();
  if (n_samples < 2)
    throw RangeError(fmt::format("ensemble size must be >= 2, got {}", n_samples));
  if (!(significance > 0.0))
    throw RangeError(fmt::format("significance threshold must be > 0, got {}",
                                 significance));
}

std::uint64_t cell_seed(std::uint64_t run_seed, const ScalePair& scale) {
  return derive_key({run_seed, scale.geo_level, scale.tech_level});
}

GridCell compute_cell(const WeightedMap& finest, const ScalePair& scale,
                      const GridConfig& cfg) {
  GridCell cell;
  cell.scale = scale;
  try {
    WeightedMap weighted = aggregate_map(finest, scale);
    BinaryMap pruned = prune_empty(binarize(weighted, cfg.rca)).map;
    cell.rows = pruned.rows();
    cell.cols = pruned.cols();
    cell.fill = pruned.fill();
    Packed packed = rank_and_pack(pruned, cfg.fitness);
    cell.t_empirical = measure_temperature(packed.map).temperature;

    EnsembleOptions opts;
    opts.threads = cfg.threads;
    opts.fitness = cfg.fitness;
    if (cfg.transposed) {
      opts.transposed = true;
      opts.column_blocks = blocks_from_labels(pruned.col_labels, scale.tech_level - 1);
    }
    NullEnsemble ens = null_ensemble(pruned, cfg.n_samples, cell_seed(cfg.seed, scale), opts);
    cell.null_mean = ens.mean;
    cell.null_std = ens.std;
    cell.n_samples = ens.n_samples;
    cell.z = z_score(cell.t_empirical, ens);
    cell.ensemble = std::move(ens);
    if (cell.z.degenerate) {
      cell.degenerate = true;
      cell.note = "null ensemble has zero spread";
    }
  } catch (const DegenerateError& e) {
    cell.degenerate = true;
    cell.note = e.what();
  } catch (const PathologicalError& e) {
    cell.degenerate = true;
    cell.note = e.what();
  }
  return cell;
}

ScaleGrid compute_grid(const std::vector<PatentRecord>& records, const GridConfig& cfg) {
  cfg.Validate();
  if (records.empty()) throw InputError("no valid records");
  WeightedMap finest = build_finest_map(records, cfg.ingest);
  ScaleGrid grid;
  grid.geo_depth = cfg.ingest.finest_geo_level;
  grid.tech_depth = cfg.ingest.finest_tech_level;
  grid.significance_threshold = cfg.significance;
  for (std::size_t g = 1; g <= grid.geo_depth; ++g)
    for (std::size_t t = 1; t <= grid.tech_depth; ++t)
      grid.cells.emplace(ScalePair{g, t}, compute_cell(finest, {g, t}, cfg));
  return grid;
}

Frontier extract_frontier(const ScaleGrid& grid) {
  Frontier f;
  for (const auto& [scale, cell] : grid.cells) {
    if (cell.degenerate || cell.z.degenerate || std::isnan(cell.z.z)) {
      f.degenerate.push_back(scale);
    } else if (cell.z.z <= -grid.significance_threshold) {
      f.nested.push_back(scale);
    } else if (cell.z.z >= grid.significance_threshold) {
      f.antinested.push_back(scale);
    } else {
      f.insignificant.push_back(scale);
    }
  }
  return f;
}

namespace {

constexpr const char* kGridHeader =
    "geo_level,tech_level,rows,cols,fill,T_emp,null_mean,null_std,z,p_emp,n_samples,"
    "degenerate";

std::string num(double v) { return fmt::format("{:.10g}", v); }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t lineno) {
  if (s.empty()) return std::nan("");
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(lineno, fmt::format("bad number '{}'", s));
  }
}

std::size_t parse_count(const std::string& s, std::size_t lineno) {
  if (s.empty()) return 0;
  try {
    std::size_t used = 0;
    unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ParseError(lineno, fmt::format("bad integer '{}'", s));
  }
}

}  // namespace

void write_grid_csv(std::ostream& out, const ScaleGrid& grid) {
  out << kGridHeader << '\n';
  for (const auto& [scale, c] : grid.cells) {
    const bool scored = c.n_samples > 0;
    const bool measured = c.rows > 0;
    out << scale.geo_level << ',' << scale.tech_level << ',';
    if (measured)
      out << c.rows << ',' << c.cols << ',' << num(c.fill) << ',' << num(c.t_empirical);
    else
      out << ",,,";
    out << ',';
    if (scored) out << num(c.null_mean) << ',' << num(c.null_std);
    else out << ',';
    out << ',';
    if (scored && !c.z.degenerate) out << num(c.z.z);
    out << ',';
    if (scored) out << num(c.z.empirical_p);
    out << ',' << c.n_samples << ',' << (c.degenerate ? 1 : 0) << '\n';
  }
}

ScaleGrid read_grid_csv(std::istream& in, double significance_threshold) {
  ScaleGrid grid;
  grid.significance_threshold = significance_threshold;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != kGridHeader) throw ParseError(lineno, "unexpected grid header");
      header = true;
      continue;
    }
    auto f = split(line);
    if (f.size() != 12)
      throw ParseError(lineno, fmt::format("expected 12 fields, got {}", f.size()));
    GridCell c;
    c.scale = {parse_count(f[0], lineno), parse_count(f[1], lineno)};
    if (c.scale.geo_level < 1 || c.scale.tech_level < 1)
      throw ParseError(lineno, "scale levels must be >= 1");
    c.rows = parse_count(f[2], lineno);
    c.cols = parse_count(f[3], lineno);
    c.fill = parse_double(f[4], lineno);
    c.t_empirical = parse_double(f[5], lineno);
    c.null_mean = parse_double(f[6], lineno);
    c.null_std = parse_double(f[7], lineno);
    c.z.z = parse_double(f[8], lineno);
    c.z.t_empirical = c.t_empirical;
    c.z.empirical_p = f[9].empty() ? 1.0 : parse_double(f[9], lineno);
    c.n_samples = parse_count(f[10], lineno);
    if (f[11] != "0" && f[11] != "1")
      throw ParseError(lineno, "degenerate flag must be 0 or 1");
    c.degenerate = f[11] == "1";
    c.z.degenerate = std::isnan(c.z.z);
    grid.geo_depth = std::max(grid.geo_depth, c.scale.geo_level);
    grid.tech_depth = std::max(grid.tech_depth, c.scale.tech_level);
    if (!grid.cells.emplace(c.scale, std::move(c)).second)
      throw ParseError(lineno, "duplicate scale pair");
  }
  if (!header) throw ParseError(lineno, "empty grid file");
  return grid;
}

}  // namespace scalenest
