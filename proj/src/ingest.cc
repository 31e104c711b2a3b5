#include "scalenest/ingest.h"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

#include "scalenest/errors.h"

namespace scalenest {

using nlohmann::json;

void IngestConfig::Validate() const {
  if (finest_geo_level < 1 || finest_tech_level < 1)
    throw RangeError("finest levels must be >= 1");
  if (date_window && date_window->end < date_window->start)
    throw RangeError("date window start is after its end");
}

std::chrono::year_month_day parse_iso_date(const std::string& text) {
  using namespace std::chrono;
  auto digits = [&](std::size_t pos, std::size_t len) {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (text[i] < '0' || text[i] > '9')
        throw InputError(fmt::format("bad date '{}'", text));
      v = v * 10 + (text[i] - '0');
    }
    return v;
  };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-')
    throw InputError(fmt::format("bad date '{}', expected YYYY-MM-DD", text));
  year_month_day ymd{year{digits(0, 4)}, month{static_cast<unsigned>(digits(5, 2))},
                     day{static_cast<unsigned>(digits(8, 2))}};
  if (!ymd.ok()) throw InputError(fmt::format("invalid calendar date '{}'", text));
  return ymd;
}

CodeRewriteTable CodeRewriteTable::Load(std::istream& in) {
  CodeRewriteTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size())
      throw ParseError(lineno, "expected 'native<TAB>dotted'");
    table.Add(line.substr(0, tab), line.substr(tab + 1));
  }
  return table;
}

void CodeRewriteTable::Add(std::string native, std::string dotted) {
  table_[std::move(native)] = std::move(dotted);
}

const std::string& CodeRewriteTable::Apply(const std::string& code) const {
  auto it = table_.find(code);
  return it == table_.end() ? code : it->second;
}

namespace {

std::vector<CodePath> parse_codes(const json& obj, const char* key, Dimension dim,
                                  std::size_t lineno,
                                  const CodeRewriteTable* rewrite) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(lineno, fmt::format("missing \"{}\"", key));
  if (!it->is_array())
    throw ParseError(lineno, fmt::format("\"{}\" must be an array", key));
  std::vector<CodePath> codes;
  for (const auto& v : *it) {
    if (!v.is_string())
      throw ParseError(lineno, fmt::format("\"{}\" entries must be strings", key));
    const std::string& raw = v.get_ref<const std::string&>();
    try {
      codes.push_back(CodePath::Parse(rewrite ? rewrite->Apply(raw) : raw, dim));
    } catch (const InputError& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return codes;
}

bool in_window(const std::chrono::year_month_day& d, const DateWindow& w) {
  return !(d < w.start) && !(w.end < d);
}

}  // namespace

std::vector<PatentRecord> parse_patents(std::istream& in, const IngestConfig& cfg,
                                        IngestCounts* counts,
                                        const CodeRewriteTable* rewrite) {
  std::vector<PatentRecord> records;
  std::unordered_set<std::string> ids;
  IngestCounts local;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(lineno, fmt::format("invalid JSON: {}", e.what()));
    }
    if (!obj.is_object()) throw ParseError(lineno, "record must be a JSON object");
    auto id = obj.find("id");
    if (id == obj.end() || !id->is_string())
      throw ParseError(lineno, "missing string \"id\"");

    PatentRecord rec;
    rec.id = id->get<std::string>();
    rec.geo_codes = parse_codes(obj, "geo", Dimension::kGeo, lineno, rewrite);
    rec.tech_codes = parse_codes(obj, "tech", Dimension::kTech, lineno, rewrite);
    if (auto d = obj.find("date"); d != obj.end() && !d->is_null()) {
      if (!d->is_string()) throw ParseError(lineno, "\"date\" must be a string");
      try {
        rec.date = parse_iso_date(d->get<std::string>());
      } catch (const InputError& e) {
        throw ParseError(lineno, e.what());
      }
    }
    if (!ids.insert(rec.id).second)
      throw DuplicateError(
          fmt::format("line {}: duplicate record id '{}'", lineno, rec.id));
    ++local.parsed;
    if (cfg.date_window && rec.date && !in_window(*rec.date, *cfg.date_window)) {
      ++local.filtered;
      continue;
    }
    normalize_record(rec);
    records.push_back(std::move(rec));
  }
  local.kept = records.size();
  if (counts) {
    counts->parsed += local.parsed;
    counts->filtered += local.filtered;
    counts->kept = local.kept;
  }
  return records;
}

std::vector<PatentRecord> apply_validation(std::vector<PatentRecord> records,
                                           const IngestConfig& cfg,
                                           IngestCounts* counts) {
  ValidationReport report =
      validate_hierarchy(records, cfg.finest_geo_level, cfg.finest_tech_level);
  if (report.ok()) {
    if (counts) counts->kept = records.size();
    return records;
  }
  if (cfg.invalid_record_policy == InvalidRecordPolicy::kReject) {
    const auto& v = report.violations.front();
    throw InputError(fmt::format("{} invalid record(s); first: '{}': {}",
                                 report.violations.size(), v.record_id, v.reason));
  }
  std::unordered_set<std::string> bad;
  for (const auto& v : report.violations) bad.insert(v.record_id);
  std::erase_if(records, [&](const PatentRecord& r) { return bad.count(r.id) > 0; });
  if (counts) {
    counts->skipped += report.violations.size();
    counts->skipped_records.insert(counts->skipped_records.end(),
                                   report.violations.begin(), report.violations.end());
    counts->kept = records.size();
  }
  if (records.empty()) throw InputError("every record failed validation");
  return records;
}

namespace {

std::size_t index_of(const std::vector<CodePath>& sorted, const CodePath& key) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), key);
  return static_cast<std::size_t>(it - sorted.begin());
}

std::vector<CodePath> sorted_unique(std::set<CodePath> s) {
  return {std::make_move_iterator(s.begin()), std::make_move_iterator(s.end())};
}

}  // namespace

WeightedMap build_finest_map(const std::vector<PatentRecord>& records,
                             const IngestConfig& cfg) {
  if (records.empty()) throw InputError("no records to build a map from");
  const std::size_t g = cfg.finest_geo_level;
  const std::size_t t = cfg.finest_tech_level;

  // Codes deeper than the finest level are truncated but not merged: two
  // codes sharing a prefix both contribute their share to the same cell,
  // exactly as they would when a deeper map is aggregated.
  std::vector<std::vector<CodePath>> geo(records.size()), tech(records.size());
  std::set<CodePath> rows, cols;
  for (std::size_t k = 0; k < records.size(); ++k) {
    for (const auto& c : records[k].geo_codes) geo[k].push_back(truncate_code(c, g));
    for (const auto& c : records[k].tech_codes) tech[k].push_back(truncate_code(c, t));
    rows.insert(geo[k].begin(), geo[k].end());
    cols.insert(tech[k].begin(), tech[k].end());
  }

  WeightedMap map;
  map.scale = {g, t};
  map.row_labels = sorted_unique(std::move(rows));
  map.col_labels = sorted_unique(std::move(cols));
  map.weights = RealMatrix(map.row_labels.size(), map.col_labels.size(), 0.0);
  for (std::size_t k = 0; k < records.size(); ++k) {
    const double share = 1.0 / static_cast<double>(geo[k].size() * tech[k].size());
    for (const auto& gc : geo[k]) {
      std::size_t r = index_of(map.row_labels, gc);
      for (const auto& tc : tech[k]) map.weights(r, index_of(map.col_labels, tc)) += share;
    }
  }
  return map;
}

WeightedMap aggregate_map(const WeightedMap& map, const ScalePair& target) {
  if (target.geo_level < 1 || target.tech_level < 1 ||
      target.geo_level > map.scale.geo_level ||
      target.tech_level > map.scale.tech_level)
    throw RangeError(fmt::format(
        "cannot aggregate map at (geo {}, tech {}) to (geo {}, tech {})",
        map.scale.geo_level, map.scale.tech_level, target.geo_level,
        target.tech_level));
  if (target == map.scale) return map;

  auto project = [](const std::vector<CodePath>& labels, std::size_t level,
                    std::vector<CodePath>& out_labels) {
    std::vector<CodePath> truncated;
    truncated.reserve(labels.size());
    for (const auto& l : labels) truncated.push_back(truncate_code(l, level));
    out_labels = truncated;
    out_labels.erase(std::unique(out_labels.begin(), out_labels.end()),
                     out_labels.end());
    std::vector<std::size_t> index(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
      index[i] = index_of(out_labels, truncated[i]);
    return index;
  };

  WeightedMap out;
  out.scale = target;
  auto row_index = project(map.row_labels, target.geo_level, out.row_labels);
  auto col_index = project(map.col_labels, target.tech_level, out.col_labels);
  out.weights = RealMatrix(out.row_labels.size(), out.col_labels.size(), 0.0);
  for (std::size_t r = 0; r < map.weights.rows(); ++r)
    for (std::size_t c = 0; c < map.weights.cols(); ++c)
      out.weights(row_index[r], col_index[c]) += map.weights(r, c);
  return out;
}

void write_manifest(std::ostream& out, const IngestCounts& counts) {
  out << "records_parsed = " << counts.parsed << '\n'
      << "records_filtered = " << counts.filtered << '\n'
      << "records_skipped = " << counts.skipped << '\n'
      << "records_used = " << counts.kept << '\n';
  for (const auto& v : counts.skipped_records)
    out << "skipped " << v.record_id << ": " << v.reason << '\n';
}

std::string record_to_json_line(const PatentRecord& record) {
  nlohmann::ordered_json obj;
  obj["id"] = record.id;
  obj["geo"] = nlohmann::ordered_json::array();
  for (const auto& c : record.geo_codes) obj["geo"].push_back(c.str());
  obj["tech"] = nlohmann::ordered_json::array();
  for (const auto& c : record.tech_codes) obj["tech"].push_back(c.str());
  if (record.date) {
    const auto& d = *record.date;
    obj["date"] = fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(d.year()),
                              static_cast<unsigned>(d.month()),
                              static_cast<unsigned>(d.day()));
  }
  return obj.dump();
}

}  // namespace scalenest
