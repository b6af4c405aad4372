#pragma once

#include <functional>
#include <vector>

namespace crio {

/// Worker count for grid distribution: CRIO_NUM_WORKERS when set (clamped to
/// [1, 256]), otherwise the hardware concurrency.
int worker_count();

/// Evaluate fn(0..n-1) across the worker pool; results are stored by index,
/// so the output is independent of scheduling.
std::vector<double> parallel_map(int n, const std::function<double(int)>& fn);

/// Fixed-tree pairwise sum over the index order of xs; bit-stable for a given
/// input regardless of how the values were produced.
double pairwise_sum(const std::vector<double>& xs);

}  // namespace crio
