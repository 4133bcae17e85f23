#pragma once

#include "mscope/point_cloud.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace mscope {

/// Exact Euclidean neighbors of one query point, self excluded, ordered by
/// ascending distance with ties broken by ascending point index.
struct NeighborResult {
    std::vector<std::size_t> indices;
    std::vector<double> distances;
};

struct TwoNearest {
    double r1 = 0.0;
    double r2 = 0.0;
};

/// Squared Euclidean distance. Every neighbor query goes through this kernel,
/// so the same pair always yields the same bits.
double squared_distance(std::span<const double> a, std::span<const double> b);

/// Requires 1 <= k <= N-1.
NeighborResult knn(const PointCloud& cloud, std::size_t query_index, std::size_t k);

/// knn for each query, computed in parallel; slot i answers queries[i].
std::vector<NeighborResult> knn_batch(const PointCloud& cloud, std::span<const std::size_t> queries,
                                      std::size_t k, int threads = 1);

/// (r1, r2) for every point. Requires N >= 3.
std::vector<TwoNearest> two_nearest_all(const PointCloud& cloud, int threads = 1);

} // namespace mscope
