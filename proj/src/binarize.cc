#include "scalenest/binarize.h"

#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "scalenest/errors.h"

namespace scalenest {

void RcaConfig::Validate() const {
  if (!(threshold > 0.0))
    throw RangeError(fmt::format("RCA threshold must be > 0, got {}", threshold));
}

RealMatrix rca_matrix(const WeightedMap& map) {
  const auto& w = map.weights;
  std::vector<double> row_sum(w.rows(), 0.0), col_sum(w.cols(), 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < w.rows(); ++r)
    for (std::size_t c = 0; c < w.cols(); ++c) {
      row_sum[r] += w(r, c);
      col_sum[c] += w(r, c);
    }
  for (double s : row_sum) total += s;
  if (!(total > 0.0)) throw DegenerateError("RCA of an all-zero map");

  RealMatrix rca(w.rows(), w.cols(), 0.0);
  for (std::size_t r = 0; r < w.rows(); ++r) {
    if (row_sum[r] <= 0.0) continue;
    for (std::size_t c = 0; c < w.cols(); ++c) {
      if (col_sum[c] <= 0.0) continue;
      rca(r, c) = (w(r, c) / row_sum[r]) / (col_sum[c] / total);
    }
  }
  return rca;
}

namespace {

std::vector<RowBlock> parent_blocks(const std::vector<CodePath>& labels,
                                    std::size_t geo_level) {
  return blocks_from_labels(labels, geo_level > 0 ? geo_level - 1 : 0);
}

}  // namespace

BinaryMap threshold_binarize(const RealMatrix& rca, const WeightedMap& source,
                             const RcaConfig& cfg) {
  cfg.Validate();
  if (rca.rows() != source.row_labels.size() || rca.cols() != source.col_labels.size())
    throw ShapeError("RCA matrix does not match its source map");
  BinaryMap out;
  out.scale = source.scale;
  out.row_labels = source.row_labels;
  out.col_labels = source.col_labels;
  out.bits = BitMatrix(rca.rows(), rca.cols(), 0);
  for (std::size_t r = 0; r < rca.rows(); ++r)
    for (std::size_t c = 0; c < rca.cols(); ++c)
      out.bits(r, c) = rca(r, c) >= cfg.threshold ? 1 : 0;
  out.row_blocks = parent_blocks(out.row_labels, out.scale.geo_level);
  return out;
}

namespace {

struct KeepMask {
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
};

// Indices of rows and columns that survive iterated removal of empty lines.
KeepMask surviving_lines(const BitMatrix& bits) {
  const std::size_t m = bits.rows(), n = bits.cols();
  std::vector<std::size_t> row_deg(m, 0), col_deg(n, 0);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (bits(r, c)) ++row_deg[r], ++col_deg[c];
  // Dropping an empty line leaves every other degree unchanged, so a single
  // pass reaches the fixed point of iterated pruning.
  KeepMask mask;
  for (std::size_t r = 0; r < m; ++r)
    if (row_deg[r] > 0) mask.rows.push_back(r);
  for (std::size_t c = 0; c < n; ++c)
    if (col_deg[c] > 0) mask.cols.push_back(c);
  return mask;
}

BitMatrix select(const BitMatrix& bits, const KeepMask& mask) {
  BitMatrix out(mask.rows.size(), mask.cols.size(), 0);
  for (std::size_t i = 0; i < mask.rows.size(); ++i) {
    auto src = bits.row(mask.rows[i]);
    auto dst = out.row(i);
    for (std::size_t j = 0; j < mask.cols.size(); ++j) dst[j] = src[mask.cols[j]];
  }
  return out;
}

void require_2x2(const KeepMask& mask) {
  if (mask.rows.size() < 2 || mask.cols.size() < 2)
    throw DegenerateError(fmt::format("pruning leaves a {}x{} matrix",
                                      mask.rows.size(), mask.cols.size()));
}

}  // namespace

BitMatrix prune_bits(const BitMatrix& bits) {
  KeepMask mask = surviving_lines(bits);
  require_2x2(mask);
  if (mask.rows.size() == bits.rows() && mask.cols.size() == bits.cols()) return bits;
  return select(bits, mask);
}

Pruned prune_empty(const BinaryMap& map) {
  KeepMask mask = surviving_lines(map.bits);
  const auto& rows = mask.rows;
  const auto& cols = mask.cols;
  Pruned out;
  for (std::size_t r = 0, k = 0; r < map.rows(); ++r) {
    if (k < rows.size() && rows[k] == r) ++k;
    else out.report.removed_rows.push_back(map.row_labels[r].str());
  }
  for (std::size_t c = 0, k = 0; c < map.cols(); ++c) {
    if (k < cols.size() && cols[k] == c) ++k;
    else out.report.removed_cols.push_back(map.col_labels[c].str());
  }
  require_2x2(mask);

  BinaryMap& m = out.map;
  m.scale = map.scale;
  if (out.report.empty()) {
    m = map;
    return out;
  }
  for (auto r : rows) m.row_labels.push_back(map.row_labels[r]);
  for (auto c : cols) m.col_labels.push_back(map.col_labels[c]);
  m.bits = select(map.bits, mask);

  // Surviving rows keep their relative order, so each old block maps onto a
  // (possibly shorter) contiguous run.
  if (!map.row_blocks.empty()) {
    std::size_t i = 0;
    for (const auto& b : map.row_blocks) {
      std::size_t begin = i;
      while (i < rows.size() && rows[i] < b.end) ++i;
      if (i > begin) m.row_blocks.push_back({begin, i});
    }
  }
  return out;
}

void write_binary_csv(std::ostream& out, const BinaryMap& map) {
  for (const auto& c : map.col_labels) out << ',' << c.str();
  out << '\n';
  for (std::size_t r = 0; r < map.rows(); ++r) {
    out << map.row_labels[r].str();
    for (auto b : map.bits.row(r)) out << (b ? ",1" : ",0");
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

BinaryMap read_binary_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  BinaryMap map;
  std::vector<std::vector<std::uint8_t>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv(line);
    try {
      if (map.col_labels.empty()) {
        if (fields.size() < 2 || !fields[0].empty())
          throw ParseError(lineno, "header must start with an empty cell");
        for (std::size_t i = 1; i < fields.size(); ++i)
          map.col_labels.push_back(CodePath::Parse(fields[i], Dimension::kTech));
        continue;
      }
      if (fields.size() != map.col_labels.size() + 1)
        throw ParseError(lineno, fmt::format("expected {} fields, got {}",
                                             map.col_labels.size() + 1, fields.size()));
      map.row_labels.push_back(CodePath::Parse(fields[0], Dimension::kGeo));
      std::vector<std::uint8_t> row;
      for (std::size_t i = 1; i < fields.size(); ++i) {
        if (fields[i] != "0" && fields[i] != "1")
          throw ParseError(lineno, fmt::format("cell '{}' is not 0/1", fields[i]));
        row.push_back(fields[i] == "1");
      }
      rows.push_back(std::move(row));
    } catch (const InputError& e) {
      throw ParseError(lineno, e.what());
    }
  }
  if (rows.empty()) throw ParseError(lineno, "matrix has no rows");
  map.bits = BitMatrix(rows.size(), map.col_labels.size(), 0);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) map.bits(r, c) = rows[r][c];
  map.scale = {map.row_labels.front().depth(), map.col_labels.front().depth()};
  map.row_blocks = {RowBlock{0, rows.size()}};
  return map;
}

}  // namespace scalenest
