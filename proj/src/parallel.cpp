#include "kdvb/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <string>

namespace kdvb {

int worker_count() {
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("KDVB_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap > 0) n = std::min(n, cap);
    } catch (const std::exception&) {
      // ignored: malformed values leave the OpenMP default in place
    }
  }
  return std::max(1, n);
}

}  // namespace kdvb
