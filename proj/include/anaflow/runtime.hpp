#pragma once

namespace anaflow {

/// Worker threads used by the grid sweeps in the seminorm module. The
/// reductions are max-merges in chunk order, so results do not depend on
/// the count.
void set_thread_count(int n);
int thread_count();

}  // namespace anaflow
