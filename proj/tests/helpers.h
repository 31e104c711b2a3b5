#ifndef SCALENEST_TESTS_HELPERS_H_
#define SCALENEST_TESTS_HELPERS_H_

#include <initializer_list>
#include <string>
#include <vector>

#include "scalenest/model.h"

namespace testing {

using namespace scalenest;

inline CodePath geo(const std::string& s) { return CodePath::Parse(s, Dimension::kGeo); }
inline CodePath tech(const std::string& s) { return CodePath::Parse(s, Dimension::kTech); }

inline PatentRecord record(const std::string& id, std::vector<std::string> g,
                           std::vector<std::string> t) {
  PatentRecord r;
  r.id = id;
  for (auto& s : g) r.geo_codes.push_back(geo(s));
  for (auto& s : t) r.tech_codes.push_back(tech(s));
  normalize_record(r);
  return r;
}

inline BitMatrix bits(std::initializer_list<std::initializer_list<int>> rows) {
  BitMatrix m(rows.size(), rows.begin()->size(), 0);
  std::size_t i = 0;
  for (auto& r : rows) {
    std::size_t j = 0;
    for (int v : r) m(i, j++) = static_cast<std::uint8_t>(v);
    ++i;
  }
  return m;
}

inline RealMatrix reals(std::initializer_list<std::initializer_list<double>> rows) {
  RealMatrix m(rows.size(), rows.begin()->size(), 0.0);
  std::size_t i = 0;
  for (auto& r : rows) {
    std::size_t j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

// Looks a cell up by its labels; 0 when either label is absent.
inline double weight_at(const WeightedMap& w, const std::string& g, const std::string& t) {
  for (std::size_t i = 0; i < w.row_labels.size(); ++i)
    if (w.row_labels[i].str() == g)
      for (std::size_t j = 0; j < w.col_labels.size(); ++j)
        if (w.col_labels[j].str() == t) return w.weights(i, j);
  return 0.0;
}

}  // namespace testing

#endif  // SCALENEST_TESTS_HELPERS_H_
