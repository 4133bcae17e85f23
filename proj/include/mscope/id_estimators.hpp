#pragma once

#include "mscope/point_cloud.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace mscope {

enum class IdMethod { TwoNN, Lpca };

std::string_view to_string(IdMethod method);

/// Global intrinsic-dimension estimate plus fit diagnostics.
struct IdEstimate {
    double d_hat = 0.0;
    std::size_t n_used = 0;
    /// Points removed before or during the fit: duplicates (r1 = 0) and the
    /// discarded upper tail of the ratio distribution.
    std::size_t n_discarded = 0;
    /// TwoNN: RMS residual of the line fit. LPCA: unexplained variance fraction.
    double fit_rmse = 0.0;
    IdMethod method = IdMethod::TwoNN;
};

struct TwoNNRatios {
    /// r2 / r1 per surviving point, in point order.
    std::vector<double> mu;
    /// Points dropped because r1 = 0.
    std::size_t n_duplicates = 0;
};

struct TwoNNParams {
    double discard_fraction = 0.1;
    std::optional<std::size_t> subsample;
    std::uint64_t seed = 0;
    int threads = 1;
};

TwoNNRatios twonn_ratios(const PointCloud& cloud, int threads = 1);

/**
 * Fits the empirical CDF of the neighbor-distance ratios against the Pareto
 * law F(mu) = 1 - mu^-d. With ratios sorted ascending and F_i = i/N', the
 * points (log mu_i, -log(1 - F_i)) lie on a line through the origin whose
 * slope is d. The top ceil(discard_fraction * N') ratios are dropped, and the
 * last point (F = 1) always is.
 */
IdEstimate twonn_fit(std::vector<double> mu, double discard_fraction);

IdEstimate twonn_estimate(const PointCloud& cloud, const TwoNNParams& params = {});

/// 1 - mu^-d.
double pareto_cdf(double mu, double d);

/// Smallest k whose leading covariance eigenvalues carry at least
/// 1 - variance_cutoff of the total variance.
IdEstimate lpca_estimate(const PointCloud& cloud, double variance_cutoff = 0.05);

/// Two-sided Kolmogorov-Smirnov statistic of `samples` against pareto_cdf(., d).
double pareto_ks_statistic(std::vector<double> samples, double d);

} // namespace mscope
