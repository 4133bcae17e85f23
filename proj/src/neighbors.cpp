#include "mscope/neighbors.hpp"

#include "mscope/error.hpp"
#include "mscope/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace mscope {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    const double* x = a.data();
    const double* y = b.data();
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const double d0 = x[i] - y[i];
        const double d1 = x[i + 1] - y[i + 1];
        const double d2 = x[i + 2] - y[i + 2];
        const double d3 = x[i + 3] - y[i + 3];
        s0 += d0 * d0;
        s1 += d1 * d1;
        s2 += d2 * d2;
        s3 += d3 * d3;
    }
    for (; i < n; ++i) {
        const double d = x[i] - y[i];
        s0 += d * d;
    }
    return (s0 + s1) + (s2 + s3);
}

namespace {

struct Candidate {
    double sq = std::numeric_limits<double>::infinity();
    std::size_t index = std::numeric_limits<std::size_t>::max();

    bool operator<(const Candidate& o) const { return sq < o.sq || (sq == o.sq && index < o.index); }
};

// Keeps the k smallest candidates in ascending order.
class BoundedList {
public:
    explicit BoundedList(std::size_t k) : items_(k) {}

    void offer(Candidate c) {
        if (!(c < items_.back())) return;
        std::size_t pos = items_.size() - 1;
        while (pos > 0 && c < items_[pos - 1]) {
            items_[pos] = items_[pos - 1];
            --pos;
        }
        items_[pos] = c;
    }

    const std::vector<Candidate>& items() const { return items_; }

private:
    std::vector<Candidate> items_;
};

void offer_two(Candidate (&best)[2], Candidate c) {
    if (c < best[0]) {
        best[1] = best[0];
        best[0] = c;
    } else if (c < best[1]) {
        best[1] = c;
    }
}

} // namespace

NeighborResult knn(const PointCloud& cloud, std::size_t query_index, std::size_t k) {
    const std::size_t n = cloud.size();
    if (query_index >= n) throw ArgumentError("query index out of range");
    if (k < 1 || k > n - 1)
        throw ArgumentError("k must lie in [1, N-1]; got k=" + std::to_string(k) + " with N=" + std::to_string(n));

    BoundedList best(k);
    const auto q = cloud.row(query_index);
    for (std::size_t j = 0; j < n; ++j) {
        if (j == query_index) continue;
        best.offer({squared_distance(q, cloud.row(j)), j});
    }
    NeighborResult out;
    out.indices.reserve(k);
    out.distances.reserve(k);
    for (const auto& c : best.items()) {
        out.indices.push_back(c.index);
        out.distances.push_back(std::sqrt(c.sq));
    }
    return out;
}

std::vector<NeighborResult> knn_batch(const PointCloud& cloud, std::span<const std::size_t> queries,
                                      std::size_t k, int threads) {
    std::vector<NeighborResult> out(queries.size());
    parallel_for(queries.size(), threads, [&](std::size_t i) { out[i] = knn(cloud, queries[i], k); });
    return out;
}

std::vector<TwoNearest> two_nearest_all(const PointCloud& cloud, int threads) {
    const std::size_t n = cloud.size();
    if (n < 3) throw ArgumentError("two_nearest_all needs at least 3 points");

    // Each worker scans pairs (i, j > i) for rows i = w, w + W, ... and keeps
    // its own best-two table; tables merge under the same total order, so the
    // result is independent of the worker count.
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n);
    std::vector<std::vector<std::array<Candidate, 2>>> tables(workers);
    parallel_for(workers, static_cast<int>(workers), [&](std::size_t w) {
        auto& table = tables[w];
        table.assign(n, {});
        for (std::size_t i = w; i < n; i += workers) {
            const auto a = cloud.row(i);
            Candidate own[2] = {table[i][0], table[i][1]};
            for (std::size_t j = i + 1; j < n; ++j) {
                const double sq = squared_distance(a, cloud.row(j));
                offer_two(own, {sq, j});
                auto& other = table[j];
                const Candidate c{sq, i};
                if (c < other[1]) {
                    if (c < other[0]) {
                        other[1] = other[0];
                        other[0] = c;
                    } else {
                        other[1] = c;
                    }
                }
            }
            table[i] = {own[0], own[1]};
        }
    });

    std::vector<TwoNearest> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        Candidate best[2];
        for (const auto& table : tables) {
            offer_two(best, table[i][0]);
            offer_two(best, table[i][1]);
        }
        out[i] = {std::sqrt(best[0].sq), std::sqrt(best[1].sq)};
    }
    return out;
}

} // namespace mscope
