#pragma once

#include <cstddef>
#include <functional>

namespace mixrate {

/* Worker count for parallel sections: the MIXRATE_WORKERS environment
   variable when set to a positive integer, otherwise the hardware
   concurrency (at least 1). */
int worker_count();

/* Run fn(i) for every i in [0, count) on up to `workers` threads using a
   static block partition.  The caller is responsible for making fn(i)
   write only to slot i, which keeps results identical for every worker
   count.  The first exception thrown by any fn is rethrown. */
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace mixrate
