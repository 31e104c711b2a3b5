#ifndef SCALENEST_SYNTH_H_
#define SCALENEST_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "scalenest/model.h"

namespace scalenest {

// Perfectly nested matrix: bit (i, j) is set iff the cell center lies inside
// the isocline matched to the matrix's own fill, so measure_temperature
// returns exactly 0. The realised fill is the closest self-consistent one to
// `fill`; cells centred exactly on the isocline are split by `seed`.
// Throws RangeError for m or n < 2 and DegenerateError for an out-of-range
// fill.
BinaryMap gen_nested(std::size_t m, std::size_t n, double fill, std::uint64_t seed);

enum class Regime { kInheritedDiversification, kDisjointSpecialization, kMixedFrontier };

const char* RegimeName(Regime r);
// Accepts "inherited", "disjoint", "mixed". Throws InputError otherwise.
Regime ParseRegime(const std::string& name);

struct SynthSpec {
  std::size_t n_parents = 6;
  std::size_t children_per_parent = 8;
  std::size_t n_tech_parents = 4;
  std::size_t tech_children_per_parent = 8;
  std::size_t records_per_child = 200;
  Regime regime = Regime::kInheritedDiversification;
  std::uint64_t seed = 0;
  double noise = 0.0;  // chance a record ignores its menu

  void Validate() const;  // throws RangeError
};

// Two-level geography (P<i>.C<j>) and technology (T<a>.S<b>) with planted
// structure. Parents get nested technology menus of decreasing breadth.
//  - InheritedDiversification: the children of a parent draw from nested
//    prefixes of the parent's menu.
//  - DisjointSpecialization: the parent's menu is cut into disjoint slices,
//    one per child: sibling j takes every C-th code starting at position j
//    of a menu widened to at least 2 C codes.
//  - MixedFrontier: half of each child's records go to the generic
//    subclass (S00) of a home technology class that differs between
//    siblings; the rest follow the inherited nested menus. Siblings look
//    specialized at the class level and nested at the subclass level.
// Every record carries one geo code and one tech code.
std::vector<PatentRecord> gen_records(const SynthSpec& spec);

}  // namespace scalenest

#endif  // SCALENEST_SYNTH_H_
