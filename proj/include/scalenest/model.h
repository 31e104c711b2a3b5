#ifndef SCALENEST_MODEL_H_
#define SCALENEST_MODEL_H_

#include <chrono>
#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scalenest/matrix.h"

namespace scalenest {

enum class Dimension { kGeo, kTech };

const char* DimensionName(Dimension d);

// Hierarchical code such as "US.CA.SF" or "A.A01.A01B.33". Level k of the
// hierarchy is the prefix of the first k segments; level 1 is the coarsest.
class CodePath {
 public:
  static constexpr char kSeparator = '.';

  CodePath(std::vector<std::string> segments, Dimension dimension);

  // Splits a dotted path. Throws InputError on an empty path or an empty
  // segment ("US..CA", ".US").
  static CodePath Parse(std::string_view dotted, Dimension dimension);

  const std::vector<std::string>& segments() const { return segments_; }
  Dimension dimension() const { return dimension_; }
  std::size_t depth() const { return segments_.size(); }
  std::string str() const;

  // Ordering is segment-wise lexicographic, which keeps every group of codes
  // sharing a prefix contiguous.
  friend bool operator==(const CodePath&, const CodePath&) = default;
  friend auto operator<=>(const CodePath& a, const CodePath& b) {
    if (auto c = a.dimension_ <=> b.dimension_; c != 0) return c;
    return a.segments_ <=> b.segments_;
  }

 private:
  std::vector<std::string> segments_;
  Dimension dimension_;
};

// Returns the first `level` segments of `code`. Throws RangeError unless
// 1 <= level <= code.depth().
CodePath truncate_code(const CodePath& code, std::size_t level);

struct ScalePair {
  std::size_t geo_level = 1;
  std::size_t tech_level = 1;

  friend bool operator==(const ScalePair&, const ScalePair&) = default;
  friend auto operator<=>(const ScalePair&, const ScalePair&) = default;
};

struct PatentRecord {
  std::string id;
  std::vector<CodePath> geo_codes;   // deduplicated, sorted
  std::vector<CodePath> tech_codes;  // deduplicated, sorted
  std::optional<std::chrono::year_month_day> date;
};

// Deduplicates and sorts the code sets of a record in place.
void normalize_record(PatentRecord& record);

struct Violation {
  std::string record_id;
  std::string reason;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks every record against the depth and non-emptiness invariants.
// Throws InputError when `records` is empty.
ValidationReport validate_hierarchy(const std::vector<PatentRecord>& records,
                                    std::size_t finest_geo,
                                    std::size_t finest_tech);

// Half-open range [begin, end) of row indices sharing one parent.
struct RowBlock {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  friend bool operator==(const RowBlock&, const RowBlock&) = default;
};

// Groups sorted labels by their prefix at `parent_level`. A parent level of
// zero yields a single block spanning every row. Throws PreconditionError if
// the labels are not grouped contiguously.
std::vector<RowBlock> blocks_from_labels(const std::vector<CodePath>& labels,
                                         std::size_t parent_level);

// Location x technology weights at one scale pair, before binarization.
struct WeightedMap {
  ScalePair scale;
  std::vector<CodePath> row_labels;
  std::vector<CodePath> col_labels;
  RealMatrix weights;

  double total() const;
};

// 0/1 incidence matrix. `row_blocks` is empty once the rows have been
// reordered (packing destroys block contiguity).
struct BinaryMap {
  ScalePair scale;
  std::vector<CodePath> row_labels;
  std::vector<CodePath> col_labels;
  BitMatrix bits;
  std::vector<RowBlock> row_blocks;

  std::size_t rows() const { return bits.rows(); }
  std::size_t cols() const { return bits.cols(); }
  std::size_t ones() const;
  double fill() const;
  std::vector<std::size_t> row_sums() const;
  std::vector<std::size_t> col_sums() const;
};

// Builds a BinaryMap from bare bits, labelling rows "r<i>" and columns
// "c<j>" (zero padded so label order equals index order) with a single
// row block. Handy for synthetic matrices and tests.
BinaryMap make_binary_map(BitMatrix bits);

// Swaps rows and columns, labels and dimensions included. Row blocks are
// dropped.
BinaryMap transpose(const BinaryMap& map);

}  // namespace scalenest

#endif  // SCALENEST_MODEL_H_
