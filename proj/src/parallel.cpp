#include "cifc/parallel.hpp"

#include <cstdlib>
#include <string>

namespace cifc {

unsigned worker_count() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("CIFC_THREADS")) {
    try {
      long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v) < hw ? static_cast<unsigned>(v) : hw;
    } catch (const std::exception&) {
    }
  }
  return hw;
}

}  // namespace cifc
