#include "isct/parallel.hpp"

namespace isct {

int& worker_threads() {
  static int n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

}  // namespace isct
