#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace isct {

// Global worker cap, settable from the CLI (--threads).
int& worker_threads();

// Static-chunk parallel loop over [0, n). Each index must write only its own
// output slot; chunk boundaries are deterministic so results do not depend
// on scheduling.
inline void parallel_for(int n, const std::function<void(int)>& body) {
  int nt = std::min(worker_threads(), n);
  if (nt <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  int chunk = (n + nt - 1) / nt;
  for (int t = 0; t < nt; ++t) {
    int lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (int i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace isct
