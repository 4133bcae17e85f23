#include "mscope/neighborhood_synthesis.hpp"

#include "mscope/error.hpp"
#include "mscope/parallel.hpp"
#include "mscope/rng.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <limits>

namespace mscope {

namespace {

void validate(const SeriesSample& series) {
    if (series.t_len() < 2) throw ArgumentError("series needs at least 2 time steps");
    if (series.n_features() < 1) throw ArgumentError("series needs at least 1 feature");
    if (!series.values.allFinite()) throw DataError("non-finite value in series");
}

std::size_t cutoff_from(const Eigen::VectorXd& sigma, double ev_threshold) {
    const double total = sigma.squaredNorm();
    if (!(total > 0.0)) throw DataError("all-zero series");
    for (Eigen::Index j = 0; j < sigma.size(); ++j)
        if (sigma[j] * sigma[j] / total <= ev_threshold) return static_cast<std::size_t>(j) + 1;
    return static_cast<std::size_t>(sigma.size()) + 1;
}

} // namespace

std::size_t mode_cutoff(const SeriesSample& series, double ev_threshold) {
    if (!(ev_threshold > 0.0 && ev_threshold < 1.0)) throw ArgumentError("ev_threshold must lie in (0, 1)");
    validate(series);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(series.values);
    return cutoff_from(svd.singularValues(), ev_threshold);
}

std::vector<SeriesSample> generate_sv_neighborhood(const SeriesSample& series, std::size_t n_copies,
                                                   double ev_threshold, std::uint64_t seed, int threads) {
    if (n_copies < 1) throw ArgumentError("n_copies must be at least 1");
    if (!(ev_threshold > 0.0 && ev_threshold < 1.0)) throw ArgumentError("ev_threshold must lie in (0, 1)");
    validate(series);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(series.values, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sigma = svd.singularValues();
    const std::size_t m = cutoff_from(sigma, ev_threshold);
    const auto first = static_cast<Eigen::Index>(m - 1);
    const Eigen::Index tail = sigma.size() - first;
    // Singular values at roundoff level are exact zeros of the series.
    const double noise_floor = std::numeric_limits<double>::epsilon() *
                               static_cast<double>(std::max(series.values.rows(), series.values.cols())) * sigma[0];

    std::vector<SeriesSample> copies(n_copies);
    parallel_for(n_copies, threads, [&](std::size_t k) {
        Rng rng(seed, k);
        // x' = x + sum_{j >= m} (u_j - 1) sigma_j u_j v_j^T keeps the leading modes bit-for-bit.
        Eigen::VectorXd delta(tail);
        for (Eigen::Index j = 0; j < tail; ++j) {
            const double s = sigma[first + j];
            delta[j] = (rng.uniform() - 1.0) * (s > noise_floor ? s : 0.0);
        }
        copies[k].values = series.values;
        if (tail > 0)
            copies[k].values.noalias() += svd.matrixU().middleCols(first, tail) * delta.asDiagonal() *
                                          svd.matrixV().middleCols(first, tail).transpose();
    });
    return copies;
}

} // namespace mscope
