#pragma once

#include "mscope/point_cloud.hpp"

#include <cstdint>
#include <vector>

namespace mscope {

/// One multivariate series x_{1:T}: T rows (time steps) by n_features columns.
struct SeriesSample {
    Eigen::MatrixXd values;

    std::size_t t_len() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t n_features() const { return static_cast<std::size_t>(values.cols()); }
};

inline constexpr double kDefaultEvThreshold = 1e-3;
inline constexpr std::size_t kDefaultCopies = 64;

/**
 * 1-based index m of the first singular mode whose explained variance
 * sigma_m^2 / sum sigma_j^2 is at most `ev_threshold`; min(T, d) + 1 when
 * every mode is above it.
 */
std::size_t mode_cutoff(const SeriesSample& series, double ev_threshold = kDefaultEvThreshold);

/**
 * Augments a series by damping its negligible modes: for each copy, the
 * singular values sigma_m, sigma_{m+1}, ... are multiplied by independent
 * Uniform(0, 1) draws and the series is rebuilt. Modes above the cutoff are
 * untouched. Copy k draws from substream (seed, k), so the output does not
 * depend on generation order.
 */
std::vector<SeriesSample> generate_sv_neighborhood(const SeriesSample& series,
                                                   std::size_t n_copies = kDefaultCopies,
                                                   double ev_threshold = kDefaultEvThreshold,
                                                   std::uint64_t seed = 0, int threads = 1);

} // namespace mscope
