#include "scalenest/synth.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "scalenest/errors.h"
#include "scalenest/random.h"
#include "scalenest/temperature.h"

namespace scalenest {

namespace {

struct CellLevels {
  std::vector<std::size_t> strictly_inside;
  std::vector<std::size_t> on_curve;
};

// Classifies cell centers exactly the way the temperature sweep does.
CellLevels classify(std::size_t m, std::size_t n, double p) {
  CellLevels out;
  for (std::size_t i = 0; i < m; ++i) {
    const double y = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
    const double yp = std::pow(y, p);
    for (std::size_t j = 0; j < n; ++j) {
      const double x = (static_cast<double>(j) + 0.5) / static_cast<double>(n);
      const double level = std::pow(x, p) + yp;
      if (level < 1.0) out.strictly_inside.push_back(i * n + j);
      else if (level == 1.0) out.on_curve.push_back(i * n + j);
    }
  }
  return out;
}

}  // namespace

BinaryMap gen_nested(std::size_t m, std::size_t n, double fill, std::uint64_t seed) {
  if (m < 2 || n < 2)
    throw RangeError(fmt::format("nested matrix needs at least 2x2, got {}x{}", m, n));
  solve_isocline(fill);  // range check
  const std::size_t cells = m * n;
  const auto target = static_cast<std::size_t>(std::llround(fill * static_cast<double>(cells)));

  // A count k is self-consistent when the isocline for fill k / (m n) has at
  // most k centers strictly inside and at least k inside or on it. Search
  // outward from the requested count.
  for (std::size_t step = 0; step < cells; ++step) {
    for (int sign : {+1, -1}) {
      if (step == 0 && sign < 0) continue;
      const long long k = static_cast<long long>(target) + sign * static_cast<long long>(step);
      if (k < 1 || k >= static_cast<long long>(cells)) continue;
      const double f = static_cast<double>(k) / static_cast<double>(cells);
      if (f < kMinFill || f > kMaxFill) continue;
      CellLevels lv = classify(m, n, solve_isocline(f).p);
      const std::size_t inside = lv.strictly_inside.size();
      const auto want = static_cast<std::size_t>(k);
      if (inside > want || inside + lv.on_curve.size() < want) continue;

      BitMatrix bits(m, n, 0);
      for (auto c : lv.strictly_inside) bits.values()[c] = 1;
      StreamRng rng(derive_key({seed, m, n}));
      for (std::size_t e = lv.on_curve.size(); e > 1; --e)
        std::swap(lv.on_curve[e - 1], lv.on_curve[rng.below(e)]);
      for (std::size_t e = 0; e < want - inside; ++e) bits.values()[lv.on_curve[e]] = 1;
      return make_binary_map(std::move(bits));
    }
  }
  throw DegenerateError(
      fmt::format("no self-consistent nested {}x{} matrix near fill {}", m, n, fill));
}

const char* RegimeName(Regime r) {
  switch (r) {
    case Regime::kInheritedDiversification: return "inherited";
    case Regime::kDisjointSpecialization: return "disjoint";
    case Regime::kMixedFrontier: return "mixed";
  }
  return "?";
}

Regime ParseRegime(const std::string& name) {
  if (name == "inherited") return Regime::kInheritedDiversification;
  if (name == "disjoint") return Regime::kDisjointSpecialization;
  if (name == "mixed") return Regime::kMixedFrontier;
  throw InputError(fmt::format("unknown regime '{}' (inherited, disjoint, mixed)", name));
}

void SynthSpec::Validate() const {
  if (n_parents < 2 || children_per_parent < 2 || n_tech_parents < 2 ||
      tech_children_per_parent < 2 || records_per_child < 2)
    throw RangeError("synthetic counts must all be >= 2");
  if (regime == Regime::kDisjointSpecialization &&
      n_tech_parents * tech_children_per_parent < children_per_parent)
    throw RangeError("disjoint slices need at least one fine code per child");
  if (!(noise >= 0.0 && noise < 1.0))
    throw RangeError(fmt::format("noise must lie in [0, 1), got {}", noise));
}

namespace {

std::string padded(char prefix, std::size_t i, std::size_t count) {
  const auto width = fmt::formatted_size("{}", count > 0 ? count - 1 : 0);
  return fmt::format("{}{:0{}}", prefix, i, std::max<std::size_t>(width, 2));
}

// Fine technologies listed from most to least ubiquitous, round robin over
// the classes so every menu prefix spans the classes evenly.
std::vector<std::size_t> ubiquity_order(std::size_t classes, std::size_t subs,
                                        std::size_t first_sub) {
  std::vector<std::size_t> order;
  for (std::size_t b = first_sub; b < subs; ++b)
    for (std::size_t a = 0; a < classes; ++a) order.push_back(a * subs + b);
  return order;
}

std::size_t scaled_breadth(std::size_t full, std::size_t rank, std::size_t count) {
  // rank 0 keeps everything; the last rank keeps roughly full / count.
  const double share = static_cast<double>(count - rank) / static_cast<double>(count);
  return std::max<std::size_t>(1, static_cast<std::size_t>(
                                      std::llround(share * static_cast<double>(full))));
}

}  // namespace

std::vector<PatentRecord> gen_records(const SynthSpec& spec) {
  spec.Validate();
  const std::size_t A = spec.n_tech_parents, S = spec.tech_children_per_parent;
  const std::size_t P = spec.n_parents, C = spec.children_per_parent;
  const std::size_t fine = A * S;

  std::vector<CodePath> tech_codes;
  for (std::size_t a = 0; a < A; ++a)
    for (std::size_t b = 0; b < S; ++b)
      tech_codes.emplace_back(
          std::vector<std::string>{padded('T', a, A), padded('S', b, S)}, Dimension::kTech);

  // Mixed reserves subclass 0 of every class as its generic bucket.
  const bool mixed = spec.regime == Regime::kMixedFrontier;
  const std::vector<std::size_t> order = ubiquity_order(A, S, mixed ? 1 : 0);

  std::vector<PatentRecord> records;
  records.reserve(P * C * spec.records_per_child);
  StreamRng rng(derive_key({spec.seed, static_cast<std::uint64_t>(spec.regime)}));

  for (std::size_t i = 0; i < P; ++i) {
    const std::size_t parent_breadth = scaled_breadth(order.size(), i, P);
    for (std::size_t j = 0; j < C; ++j) {
      // Positions into `order` this child draws from.
      std::vector<std::size_t> menu;
      if (spec.regime == Regime::kDisjointSpecialization) {
        // Strided slices of the menu, widened so each sibling owns at least
        // two codes.
        const std::size_t span = std::min(order.size(), std::max(parent_breadth, 2 * C));
        for (std::size_t k = j; k < span; k += C) menu.push_back(order[k]);
      } else {
        const std::size_t breadth = scaled_breadth(parent_breadth, j, C);
        menu.assign(order.begin(), order.begin() + breadth);
      }
      const std::size_t home = (i + j) % A;

      CodePath geo({padded('P', i, P), padded('C', j, C)}, Dimension::kGeo);
      for (std::size_t r = 0; r < spec.records_per_child; ++r) {
        std::size_t tech;
        if (spec.noise > 0.0 && rng.uniform() < spec.noise) {
          tech = rng.below(fine);
        } else if (mixed && rng.uniform() < 0.5) {
          tech = home * S;
        } else {
          tech = menu[rng.below(menu.size())];
        }
        PatentRecord rec;
        rec.id = fmt::format("{}-{}-{}", geo.str(), r, spec.seed);
        rec.geo_codes = {geo};
        rec.tech_codes = {tech_codes[tech]};
        records.push_back(std::move(rec));
      }
    }
  }
  return records;
}

}  // namespace scalenest
