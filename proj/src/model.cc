#include "scalenest/model.h"

#include <algorithm>
#include <fmt/format.h>

#include "scalenest/errors.h"

namespace scalenest {

const char* DimensionName(Dimension d) {
  return d == Dimension::kGeo ? "geo" : "tech";
}

CodePath::CodePath(std::vector<std::string> segments, Dimension dimension)
    : segments_(std::move(segments)), dimension_(dimension) {
  if (segments_.empty()) throw InputError("code path has no segments");
  for (const auto& s : segments_) {
    if (s.empty()) throw InputError("code path has an empty segment");
    if (s.find(kSeparator) != std::string::npos)
      throw InputError(fmt::format("segment '{}' contains the separator", s));
  }
}

CodePath CodePath::Parse(std::string_view dotted, Dimension dimension) {
  std::vector<std::string> segments;
  std::size_t start = 0;
  while (true) {
    std::size_t dot = dotted.find(kSeparator, start);
    std::string_view seg = dotted.substr(start, dot == std::string_view::npos
                                                    ? std::string_view::npos
                                                    : dot - start);
    if (seg.empty())
      throw InputError(fmt::format("malformed {} code '{}'",
                                   DimensionName(dimension), dotted));
    segments.emplace_back(seg);
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return CodePath(std::move(segments), dimension);
}

std::string CodePath::str() const {
  std::string out;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (i) out += kSeparator;
    out += segments_[i];
  }
  return out;
}

CodePath truncate_code(const CodePath& code, std::size_t level) {
  if (level < 1 || level > code.depth())
    throw RangeError(fmt::format("cannot truncate {} code '{}' (depth {}) to level {}",
                                 DimensionName(code.dimension()), code.str(),
                                 code.depth(), level));
  if (level == code.depth()) return code;
  return CodePath({code.segments().begin(), code.segments().begin() + level},
                  code.dimension());
}

void normalize_record(PatentRecord& record) {
  for (auto* codes : {&record.geo_codes, &record.tech_codes}) {
    std::sort(codes->begin(), codes->end());
    codes->erase(std::unique(codes->begin(), codes->end()), codes->end());
  }
}

ValidationReport validate_hierarchy(const std::vector<PatentRecord>& records,
                                    std::size_t finest_geo,
                                    std::size_t finest_tech) {
  if (records.empty()) throw InputError("no records to validate");
  ValidationReport report;
  auto check = [&](const PatentRecord& r, const std::vector<CodePath>& codes,
                   std::size_t finest, const char* dim) {
    if (codes.empty()) {
      report.violations.push_back({r.id, fmt::format("empty {} codes", dim)});
      return;
    }
    for (const auto& code : codes) {
      if (code.depth() < finest) {
        report.violations.push_back(
            {r.id, fmt::format("{} code '{}' has depth {} < required {}", dim,
                               code.str(), code.depth(), finest)});
        return;
      }
    }
    std::vector<CodePath> sorted = codes;
    std::sort(sorted.begin(), sorted.end());
    if (auto dup = std::adjacent_find(sorted.begin(), sorted.end());
        dup != sorted.end()) {
      report.violations.push_back(
          {r.id, fmt::format("duplicate {} code '{}'", dim, dup->str())});
    }
  };
  for (const auto& r : records) {
    std::size_t before = report.violations.size();
    check(r, r.geo_codes, finest_geo, "geo");
    if (report.violations.size() == before)
      check(r, r.tech_codes, finest_tech, "tech");
  }
  return report;
}

std::vector<RowBlock> blocks_from_labels(const std::vector<CodePath>& labels,
                                         std::size_t parent_level) {
  std::vector<RowBlock> blocks;
  if (labels.empty()) return blocks;
  if (parent_level == 0) return {RowBlock{0, labels.size()}};
  std::vector<CodePath> seen;
  std::size_t begin = 0;
  CodePath current = truncate_code(labels[0], parent_level);
  for (std::size_t i = 1; i <= labels.size(); ++i) {
    if (i < labels.size()) {
      CodePath p = truncate_code(labels[i], parent_level);
      if (p == current) continue;
      seen.push_back(current);
      current = std::move(p);
    }
    blocks.push_back({begin, i});
    begin = i;
  }
  seen.push_back(current);
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw PreconditionError("row labels are not grouped by parent");
  return blocks;
}

double WeightedMap::total() const {
  double sum = 0.0;
  for (double w : weights.values()) sum += w;
  return sum;
}

std::size_t BinaryMap::ones() const {
  std::size_t n = 0;
  for (auto b : bits.values()) n += b;
  return n;
}

double BinaryMap::fill() const {
  if (bits.empty()) return 0.0;
  return static_cast<double>(ones()) / static_cast<double>(bits.size());
}

std::vector<std::size_t> BinaryMap::row_sums() const {
  std::vector<std::size_t> sums(rows(), 0);
  for (std::size_t r = 0; r < rows(); ++r)
    for (auto b : bits.row(r)) sums[r] += b;
  return sums;
}

std::vector<std::size_t> BinaryMap::col_sums() const {
  std::vector<std::size_t> sums(cols(), 0);
  for (std::size_t r = 0; r < rows(); ++r) {
    auto row = bits.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) sums[c] += row[c];
  }
  return sums;
}

namespace {

std::vector<CodePath> index_labels(char prefix, std::size_t n, Dimension dim) {
  std::size_t width = fmt::formatted_size("{}", n > 0 ? n - 1 : 0);
  std::vector<CodePath> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    labels.emplace_back(
        std::vector<std::string>{fmt::format("{}{:0{}}", prefix, i, width)}, dim);
  return labels;
}

}  // namespace

BinaryMap make_binary_map(BitMatrix bits) {
  BinaryMap map;
  map.row_labels = index_labels('r', bits.rows(), Dimension::kGeo);
  map.col_labels = index_labels('c', bits.cols(), Dimension::kTech);
  if (bits.rows() > 0) map.row_blocks = {RowBlock{0, bits.rows()}};
  map.bits = std::move(bits);
  return map;
}

BinaryMap transpose(const BinaryMap& map) {
  BinaryMap out;
  out.scale = {map.scale.tech_level, map.scale.geo_level};
  out.row_labels = map.col_labels;
  out.col_labels = map.row_labels;
  out.bits = map.bits.transposed();
  return out;
}

}  // namespace scalenest
