#include "scalenest/parallel.h"

#include <cstdlib>
#include <string>

namespace scalenest {

unsigned worker_count() {
  if (const char* env = std::getenv("SCALENEST_THREADS")) {
    try {
      long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace scalenest
