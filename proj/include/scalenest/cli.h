#ifndef SCALENEST_CLI_H_
#define SCALENEST_CLI_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "scalenest/grid.h"
#include "scalenest/model.h"
#include "scalenest/synth.h"
#include "scalenest/temperature.h"

namespace scalenest {

// Process exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;     // anything not listed below
inline constexpr int kExitInput = 2;       // unreadable or malformed input
inline constexpr int kExitConfig = 3;      // bad flags or config values
inline constexpr int kExitDegenerate = 4;  // input the pipeline cannot score

struct RunConfig {
  std::string input;
  std::string output;
  std::size_t geo_level = 2;
  std::size_t tech_level = 2;
  double threshold = 1.0;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  double sigma = 2.0;
  std::string date_from;  // ISO dates, both or neither
  std::string date_to;
  bool skip_invalid = false;
  bool transposed = false;
  bool svg = false;
  std::string rewrite;  // optional code rewrite table
  SynthSpec synth;

  // Throws RangeError on out-of-range values.
  void Validate() const;
  GridConfig ToGridConfig() const;
};

// One rectangle per cell. Blue below zero, red above, opacity min(|z|, 5)/5,
// grey for degenerate cells. Geo levels run down, tech levels across.
std::string render_heatmap(const ScaleGrid& grid);

// Presences as dots at their cell centers in the unit square, plus the
// isocline sampled at 256 points. Throws PreconditionError on a map with no
// presences.
std::string render_portrait(const BinaryMap& packed, const Isocline& iso);

// Entry point for the `scalenest` tool. Diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace scalenest

#endif  // SCALENEST_CLI_H_
