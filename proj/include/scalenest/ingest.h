#ifndef SCALENEST_INGEST_H_
#define SCALENEST_INGEST_H_

#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scalenest/model.h"

namespace scalenest {

enum class InvalidRecordPolicy { kReject, kSkip };

struct DateWindow {
  std::chrono::year_month_day start;
  std::chrono::year_month_day end;  // inclusive
};

struct IngestConfig {
  std::size_t finest_geo_level = 2;
  std::size_t finest_tech_level = 2;
  std::optional<DateWindow> date_window;
  InvalidRecordPolicy invalid_record_policy = InvalidRecordPolicy::kReject;

  // Throws RangeError on non-positive levels or an inverted window.
  void Validate() const;
};

// Parses "YYYY-MM-DD". Throws InputError on anything else.
std::chrono::year_month_day parse_iso_date(const std::string& text);

// Maps native code strings (e.g. IPC "A01B 33/00") onto dotted paths before
// they are split. One mapping per line: `native<TAB>dotted`; blank lines and
// lines starting with '#' are ignored.
class CodeRewriteTable {
 public:
  static CodeRewriteTable Load(std::istream& in);
  void Add(std::string native, std::string dotted);
  const std::string& Apply(const std::string& code) const;
  std::size_t size() const { return table_.size(); }

 private:
  std::map<std::string, std::string> table_;
};

// Tallies reported in the run manifest.
struct IngestCounts {
  std::size_t parsed = 0;    // records read from the stream
  std::size_t filtered = 0;  // dropped by the date window
  std::size_t skipped = 0;   // dropped by validation under kSkip
  std::size_t kept = 0;
  std::vector<Violation> skipped_records;
};

// One JSON object per non-blank line:
//   {"id":"p1","geo":["US.CA"],"tech":["A.A01.A01B.33"],"date":"2001-02-03"}
// Records come back in file order with code sets deduplicated. Records
// outside the configured date window are dropped and counted; records
// without a date are kept. Throws ParseError (with the line number) on a
// malformed line and DuplicateError on a repeated id.
std::vector<PatentRecord> parse_patents(std::istream& in, const IngestConfig& cfg,
                                        IngestCounts* counts = nullptr,
                                        const CodeRewriteTable* rewrite = nullptr);

// Validates and applies the invalid-record policy. Under kReject any
// violation throws InputError naming the first offending record.
std::vector<PatentRecord> apply_validation(std::vector<PatentRecord> records,
                                           const IngestConfig& cfg,
                                           IngestCounts* counts = nullptr);

// Each record spreads total weight 1 uniformly over the Cartesian product of
// its geo and tech codes, truncated to the configured finest levels.
WeightedMap build_finest_map(const std::vector<PatentRecord>& records,
                             const IngestConfig& cfg);

// Sums rows and columns that share the same truncated label. Throws
// RangeError when `target` is finer than the map in either dimension.
WeightedMap aggregate_map(const WeightedMap& map, const ScalePair& target);

void write_manifest(std::ostream& out, const IngestCounts& counts);

// Serializes one record in the line format parse_patents reads.
std::string record_to_json_line(const PatentRecord& record);

}  // namespace scalenest

#endif  // SCALENEST_INGEST_H_
