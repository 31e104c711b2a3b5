#include "scalenest/cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "scalenest/binarize.h"
#include "scalenest/errors.h"
#include "scalenest/ingest.h"
#include "scalenest/parallel.h"
#include "scalenest/rank.h"

namespace fs = std::filesystem;

namespace scalenest {

void RunConfig::Validate() const {
  if (geo_level < 1 || tech_level < 1)
    throw RangeError(fmt::format("levels must be >= 1, got geo {} tech {}", geo_level,
                                 tech_level));
  if (!(threshold > 0.0))
    throw RangeError(fmt::format("RCA threshold must be > 0, got {}", threshold));
  if (samples < 2) throw RangeError(fmt::format("samples must be >= 2, got {}", samples));
  if (!(sigma > 0.0)) throw RangeError(fmt::format("sigma must be > 0, got {}", sigma));
  if (date_from.empty() != date_to.empty())
    throw RangeError("--from and --to must be given together");
  synth.Validate();
}

GridConfig RunConfig::ToGridConfig() const {
  GridConfig cfg;
  cfg.ingest.finest_geo_level = geo_level;
  cfg.ingest.finest_tech_level = tech_level;
  cfg.ingest.invalid_record_policy =
      skip_invalid ? InvalidRecordPolicy::kSkip : InvalidRecordPolicy::kReject;
  if (!date_from.empty()) {
    try {
      cfg.ingest.date_window = DateWindow{parse_iso_date(date_from), parse_iso_date(date_to)};
    } catch (const InputError& e) {
      throw RangeError(e.what());
    }
  }
  cfg.rca.threshold = threshold;
  cfg.n_samples = samples;
  cfg.seed = seed;
  cfg.significance = sigma;
  cfg.threads = worker_count();
  cfg.transposed = transposed;
  cfg.Validate();
  return cfg;
}

namespace {

// Bad flags, bad config files, missing required values.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// `key = value` lines; '#' starts a comment line.
std::vector<std::pair<std::string, std::string>> load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError(fmt::format("cannot read config file '{}'", path));
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(fmt::format("{}:{}: expected key = value", path, lineno));
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    std::replace(key.begin(), key.end(), '_', '-');
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

// Fills options the command line left unset. Keys that belong to another
// subcommand are ignored so one file can serve a whole run.
void apply_config(CLI::App* sub, const std::string& path, const std::set<std::string>& known) {
  for (const auto& [key, value] : load_config(path)) {
    if (key == "config" || !known.count(key))
      throw UsageError(fmt::format("{}: unknown key '{}'", path, key));
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (!opt || opt->count() > 0) continue;
    try {
      opt->add_result(value);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError(fmt::format("{}: {}", path, e.what()));
    }
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot read '{}'", path));
  return in;
}

// Writes every file under a staging directory next to `dir`, then moves
// them in. Nothing lands in `dir` unless all writes succeed.
void commit_outputs(const std::string& dir, const std::map<std::string, std::string>& files) {
  fs::path target = fs::path(dir).lexically_normal();
  if (!target.has_filename()) target = target.parent_path();
  fs::path staging = target;
  staging += ".partial";
  fs::remove_all(staging);
  fs::create_directories(staging);
  try {
    for (const auto& [name, body] : files) {
      std::ofstream out(staging / name, std::ios::binary);
      out << body;
      if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", (staging / name).string()));
    }
    fs::create_directories(target);
    for (const auto& [name, body] : files) fs::rename(staging / name, target / name);
  } catch (...) {
    fs::remove_all(staging);
    throw;
  }
  fs::remove_all(staging);
}

void commit_file(const std::string& path, const std::string& body) {
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << body;
    if (!out) {
      fs::remove(tmp);
      throw std::runtime_error(fmt::format("cannot write '{}'", path));
    }
  }
  fs::rename(tmp, target);
}

std::vector<PatentRecord> load_records(const RunConfig& rc, const IngestConfig& ingest,
                                       IngestCounts* counts) {
  std::optional<CodeRewriteTable> rewrite;
  if (!rc.rewrite.empty()) {
    auto in = open_input(rc.rewrite);
    rewrite = CodeRewriteTable::Load(in);
  }
  auto in = open_input(rc.input);
  auto records = parse_patents(in, ingest, counts, rewrite ? &*rewrite : nullptr);
  return apply_validation(std::move(records), ingest, counts);
}

std::string list_pairs(const std::vector<ScalePair>& pairs) {
  std::string s;
  for (const auto& p : pairs) s += fmt::format(" ({},{})", p.geo_level, p.tech_level);
  return s.empty() ? " none" : s;
}

int cmd_grid(const RunConfig& rc, std::ostream& out) {
  if (rc.input.empty()) throw UsageError("grid needs --input");
  if (rc.output.empty()) throw UsageError("grid needs --out");
  GridConfig cfg = rc.ToGridConfig();
  IngestCounts counts;
  auto records = load_records(rc, cfg.ingest, &counts);
  ScaleGrid grid = compute_grid(records, cfg);

  std::map<std::string, std::string> files;
  std::ostringstream csv;
  write_grid_csv(csv, grid);
  files["grid.csv"] = csv.str();
  for (const auto& [scale, cell] : grid.cells) {
    if (!cell.ensemble) continue;
    std::ostringstream ens;
    write_ensemble_csv(ens, *cell.ensemble);
    files[fmt::format("ensemble_g{}_t{}.csv", scale.geo_level, scale.tech_level)] = ens.str();
  }
  if (rc.svg) files["grid.svg"] = render_heatmap(grid);

  std::ostringstream manifest;
  write_manifest(manifest, counts);
  manifest << fmt::format(
      "geo_level = {}\ntech_level = {}\nthreshold = {}\nsamples = {}\nseed = {}\n"
      "sigma = {}\ntransposed = {}\n",
      rc.geo_level, rc.tech_level, rc.threshold, rc.samples, rc.seed, rc.sigma,
      rc.transposed ? "true" : "false");
  const Frontier f = extract_frontier(grid);
  manifest << "nested:" << list_pairs(f.nested) << '\n'
           << "antinested:" << list_pairs(f.antinested) << '\n'
           << "insignificant:" << list_pairs(f.insignificant) << '\n'
           << "degenerate:" << list_pairs(f.degenerate) << '\n';
  for (const auto& [scale, cell] : grid.cells)
    if (!cell.note.empty())
      manifest << fmt::format("note ({},{}): {}\n", scale.geo_level, scale.tech_level,
                              cell.note);
  files["manifest.txt"] = manifest.str();

  commit_outputs(rc.output, files);
  out << fmt::format("{} cells written to {}\n", grid.cells.size(), rc.output);
  return kExitOk;
}

int cmd_synth(const RunConfig& rc, const std::string& nested, double fill, std::ostream& out) {
  if (rc.output.empty()) throw UsageError("synth needs --out");
  if (!nested.empty()) {
    std::size_t m = 0, n = 0;
    char x = 0;
    std::istringstream ss(nested);
    if (!(ss >> m >> x >> n) || x != 'x' || !ss.eof())
      throw UsageError(fmt::format("--nested expects ROWSxCOLS, got '{}'", nested));
    BinaryMap map = gen_nested(m, n, fill, rc.seed);
    std::ostringstream csv;
    write_binary_csv(csv, map);
    commit_file(rc.output, csv.str());
    out << fmt::format("{}x{} nested matrix, fill {:.6f}\n", m, n, map.fill());
    return kExitOk;
  }
  std::string body;
  const auto records = gen_records(rc.synth);
  for (const auto& r : records) body += record_to_json_line(r) + '\n';
  commit_file(rc.output, body);
  out << fmt::format("{} records ({})\n", records.size(), RegimeName(rc.synth.regime));
  return kExitOk;
}

// Pruned and packed map from a matrix CSV or from records at one scale.
Packed packed_input(const RunConfig& rc, const std::string& matrix) {
  if (matrix.empty() == rc.input.empty())
    throw UsageError("give exactly one of --matrix and --input");
  BinaryMap map;
  if (!matrix.empty()) {
    auto in = open_input(matrix);
    map = read_binary_csv(in);
  } else {
    GridConfig cfg = rc.ToGridConfig();
    auto records = load_records(rc, cfg.ingest, nullptr);
    if (records.empty()) throw InputError("no valid records");
    map = binarize(build_finest_map(records, cfg.ingest), cfg.rca);
  }
  return rank_and_pack(prune_empty(map).map);
}

int cmd_temperature(const RunConfig& rc, const std::string& matrix,
                    const std::string& portrait, std::ostream& out) {
  if (rc.output.empty()) throw UsageError("temperature needs --out");
  rc.Validate();
  Packed packed = packed_input(rc, matrix);
  TemperatureReport report = measure_temperature(packed.map);
  std::ostringstream csv;
  write_temperature_csv(csv, report, packed.map);
  std::string svg;
  if (!portrait.empty()) svg = render_portrait(packed.map, report.isocline);
  commit_file(rc.output, csv.str());
  if (!portrait.empty()) commit_file(portrait, svg);
  out << fmt::format("T = {:.6f} ({}x{}, fill {:.6f})\n", report.temperature, report.rows,
                     report.cols, report.fill);
  return kExitOk;
}

int cmd_render(const RunConfig& rc, const std::string& grid_path, const std::string& matrix,
               std::ostream& out) {
  if (rc.output.empty()) throw UsageError("render needs --out");
  if (!grid_path.empty()) {
    if (!matrix.empty() || !rc.input.empty())
      throw UsageError("--grid cannot be combined with --matrix or --input");
    auto in = open_input(grid_path);
    ScaleGrid grid = read_grid_csv(in, rc.sigma);
    commit_file(rc.output, render_heatmap(grid));
  } else {
    rc.Validate();
    Packed packed = packed_input(rc, matrix);
    commit_file(rc.output, render_portrait(packed.map, solve_isocline(packed.map.fill())));
  }
  out << fmt::format("wrote {}\n", rc.output);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiscale nestedness of location x technology maps", "scalenest"};
  app.require_subcommand(1);
  RunConfig rc;
  std::string config, regime = "inherited", nested, matrix, grid_path, portrait;
  double nested_fill = 0.3;

  auto add_common_input = [&](CLI::App* sub) {
    sub->add_option("--input", rc.input, "JSON-lines patent records");
    sub->add_option("--geo-level", rc.geo_level, "finest geographic level");
    sub->add_option("--tech-level", rc.tech_level, "finest technology level");
    sub->add_option("--threshold", rc.threshold, "RCA threshold");
    sub->add_option("--from", rc.date_from, "first date kept (YYYY-MM-DD)");
    sub->add_option("--to", rc.date_to, "last date kept (YYYY-MM-DD)");
    sub->add_flag("--skip-invalid", rc.skip_invalid, "drop invalid records instead of failing");
    sub->add_option("--rewrite", rc.rewrite, "native<TAB>dotted code rewrite table");
  };

  CLI::App* grid = app.add_subcommand("grid", "z-score grid over all scale pairs");
  add_common_input(grid);
  grid->add_option("--out", rc.output, "output directory");
  grid->add_option("--seed", rc.seed, "run seed");
  grid->add_option("--samples", rc.samples, "null ensemble size");
  grid->add_option("--sigma", rc.sigma, "significance threshold in standard deviations");
  grid->add_flag("--transposed", rc.transposed, "shuffle within technology blocks");
  grid->add_flag("--svg", rc.svg, "also write grid.svg");

  CLI::App* synth = app.add_subcommand("synth", "planted synthetic records");
  synth->add_option("--regime", regime, "inherited, disjoint or mixed");
  synth->add_option("--seed", rc.seed, "generator seed");
  synth->add_option("--out", rc.output, "output file");
  synth->add_option("--parents", rc.synth.n_parents, "parent regions");
  synth->add_option("--children", rc.synth.children_per_parent, "child regions per parent");
  synth->add_option("--tech-parents", rc.synth.n_tech_parents, "technology classes");
  synth->add_option("--tech-children", rc.synth.tech_children_per_parent, "subclasses per class");
  synth->add_option("--records", rc.synth.records_per_child, "records per child region");
  synth->add_option("--noise", rc.synth.noise, "chance a record ignores its menu");
  synth->add_option("--nested", nested, "write a ROWSxCOLS nested matrix instead");
  synth->add_option("--fill", nested_fill, "fill of the --nested matrix");

  CLI::App* temp = app.add_subcommand("temperature", "temperature of one map");
  add_common_input(temp);
  temp->add_option("--matrix", matrix, "binary matrix CSV");
  temp->add_option("--out", rc.output, "report CSV");
  temp->add_option("--portrait", portrait, "also write a packed-matrix SVG");

  CLI::App* render = app.add_subcommand("render", "SVG heatmap or matrix portrait");
  add_common_input(render);
  render->add_option("--grid", grid_path, "grid CSV");
  render->add_option("--matrix", matrix, "binary matrix CSV");
  render->add_option("--sigma", rc.sigma, "significance threshold");
  render->add_option("--out", rc.output, "output SVG");

  std::set<std::string> known;
  for (CLI::App* sub : {grid, synth, temp, render}) {
    sub->add_option("--config", config, "key = value run config; flags win");
    for (const CLI::Option* opt : sub->get_options())
      for (const auto& name : opt->get_lnames()) known.insert(name);
  }

  std::vector<std::string> argv(args.rbegin(), args.rend());  // CLI11 wants reversed
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (!config.empty()) apply_config(sub, config, known);
    try {
      rc.synth.regime = ParseRegime(regime);
    } catch (const InputError& e) {
      throw UsageError(e.what());
    }
    rc.synth.seed = rc.seed;
    if (sub == grid) {
      rc.Validate();
      return cmd_grid(rc, out);
    }
    if (sub == synth) {
      rc.Validate();
      return cmd_synth(rc, nested, nested_fill, out);
    }
    if (sub == temp) return cmd_temperature(rc, matrix, portrait, out);
    return cmd_render(rc, grid_path, matrix, out);
  } catch (const UsageError& e) {
    err << "scalenest: " << e.what() << '\n';
    return kExitConfig;
  } catch (const RangeError& e) {
    err << "scalenest: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "scalenest: " << e.what() << '\n';
    return kExitInput;
  } catch (const InputError& e) {
    err << "scalenest: " << e.what() << '\n';
    return kExitInput;
  } catch (const DuplicateError& e) {
    err << "scalenest: " << e.what() << '\n';
    return kExitInput;
  } catch (const DegenerateError& e) {
    err << "scalenest: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const PathologicalError& e) {
    err << "scalenest: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const PreconditionError& e) {
    err << "scalenest: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const std::exception& e) {
    err << "scalenest: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace scalenest
