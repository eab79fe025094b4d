#include "sbm/parallel.hpp"

#include <cstdlib>
#include <string>

namespace sbm {

unsigned default_threads() {
  if (const char* env = std::getenv("SBM_THREADS")) {
    try {
      const long value = std::stol(env);
      if (value > 0) return static_cast<unsigned>(value);
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

unsigned resolve_threads(unsigned threads) { return threads == 0 ? default_threads() : threads; }

}  // namespace sbm
