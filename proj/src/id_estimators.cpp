#include "mscope/id_estimators.hpp"

#include "mscope/error.hpp"
#include "mscope/neighbors.hpp"
#include "mscope/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace mscope {

std::string_view to_string(IdMethod method) { return method == IdMethod::TwoNN ? "twonn" : "lpca"; }

TwoNNRatios twonn_ratios(const PointCloud& cloud, int threads) {
    if (cloud.size() < 3) throw ArgumentError("TwoNN needs at least 3 points");
    const auto pairs = two_nearest_all(cloud, threads);
    TwoNNRatios out;
    out.mu.reserve(pairs.size());
    for (const auto& p : pairs) {
        if (p.r1 == 0.0) {
            ++out.n_duplicates;
            continue;
        }
        out.mu.push_back(p.r2 / p.r1);
    }
    if (out.mu.size() < 3) throw DataError("fewer than 3 points survive deduplication");
    return out;
}

IdEstimate twonn_fit(std::vector<double> mu, double discard_fraction) {
    if (!(discard_fraction >= 0.0 && discard_fraction < 0.5))
        throw ArgumentError("discard_fraction must lie in [0, 0.5)");
    if (mu.size() < 3) throw DataError("fewer than 3 ratios to fit");
    std::sort(mu.begin(), mu.end());

    const std::size_t total = mu.size();
    const auto tail = static_cast<std::size_t>(std::ceil(discard_fraction * static_cast<double>(total)));
    const std::size_t keep = total - std::max<std::size_t>(tail, 1);
    if (keep < 2) throw DataError("too few ratios left after discarding the tail");

    double sxy = 0.0, sxx = 0.0;
    std::vector<double> xs(keep), ys(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        const double f = static_cast<double>(i + 1) / static_cast<double>(total);
        xs[i] = std::log(mu[i]);
        ys[i] = -std::log1p(-f);
        sxy += xs[i] * ys[i];
        sxx += xs[i] * xs[i];
    }
    if (sxx == 0.0) throw DataError("degenerate ratios");

    IdEstimate est;
    est.method = IdMethod::TwoNN;
    est.d_hat = sxy / sxx;
    est.n_used = keep;
    est.n_discarded = total - keep;
    double ss = 0.0;
    for (std::size_t i = 0; i < keep; ++i) {
        const double r = ys[i] - est.d_hat * xs[i];
        ss += r * r;
    }
    est.fit_rmse = std::sqrt(ss / static_cast<double>(keep));
    return est;
}

IdEstimate twonn_estimate(const PointCloud& cloud, const TwoNNParams& params) {
    TwoNNRatios ratios;
    if (params.subsample) {
        if (*params.subsample > cloud.size())
            throw ArgumentError("subsample exceeds the number of points");
        const auto rows = sample_without_replacement(cloud.size(), *params.subsample, params.seed);
        ratios = twonn_ratios(cloud.select(rows), params.threads);
    } else {
        ratios = twonn_ratios(cloud, params.threads);
    }
    auto est = twonn_fit(std::move(ratios.mu), params.discard_fraction);
    est.n_discarded += ratios.n_duplicates;
    return est;
}

double pareto_cdf(double mu, double d) {
    if (!(mu >= 1.0) || !(d > 0.0)) throw ArgumentError("pareto_cdf needs mu >= 1 and d > 0");
    if (std::isinf(mu)) return 1.0;
    return -std::expm1(-d * std::log(mu));
}

IdEstimate lpca_estimate(const PointCloud& cloud, double variance_cutoff) {
    if (!(variance_cutoff > 0.0 && variance_cutoff < 1.0))
        throw ArgumentError("variance_cutoff must lie in (0, 1)");
    if (cloud.size() < 2) throw ArgumentError("LPCA needs at least 2 points");

    const auto& x = cloud.data();
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - mean;
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(cloud.size() - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov, Eigen::EigenvaluesOnly);
    Eigen::VectorXd lambda = solver.eigenvalues().reverse().cwiseMax(0.0);
    const double total = lambda.sum();
    if (!(total > 0.0)) throw DataError("zero total variance");

    IdEstimate est;
    est.method = IdMethod::Lpca;
    est.n_used = cloud.size();
    double running = 0.0;
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
        running += lambda[k];
        if (running / total >= 1.0 - variance_cutoff) {
            est.d_hat = static_cast<double>(k + 1);
            est.fit_rmse = (total - running) / total;
            return est;
        }
    }
    est.d_hat = static_cast<double>(lambda.size());
    return est;
}

double pareto_ks_statistic(std::vector<double> samples, double d) {
    if (samples.empty()) throw ArgumentError("KS statistic of an empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = pareto_cdf(samples[i], d);
        worst = std::max({worst, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return worst;
}

} // namespace mscope
