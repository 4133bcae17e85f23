#include "mscope/curvature.hpp"

#include "mscope/neighbors.hpp"
#include "mscope/parallel.hpp"
#include "mscope/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <string>

namespace mscope {

std::size_t caml_dimension(double d_hat, std::size_t ambient_dim) {
    if (ambient_dim < 2) throw ArgumentError("CAML needs an ambient dimension of at least 2");
    if (!std::isfinite(d_hat)) throw ArgumentError("non-finite intrinsic dimension");
    const double rounded = std::max(1.0, std::round(d_hat));
    return std::min(static_cast<std::size_t>(rounded), ambient_dim - 1);
}

TangentFrame build_local_frame(const PointCloud& cloud, std::size_t center_index,
                               std::span<const std::size_t> neighbor_indices, std::size_t d) {
    const std::size_t dim = cloud.dim();
    if (d < 1 || d >= dim) throw ArgumentError("intrinsic dimension must satisfy 1 <= d < D");
    if (neighbor_indices.size() < d + 1) throw ArgumentError("neighborhood needs at least d+1 points");
    if (center_index >= cloud.size()) throw ArgumentError("center index out of range");

    const auto& x = cloud.data();
    const auto c = static_cast<Eigen::Index>(center_index);
    const auto k = static_cast<Eigen::Index>(neighbor_indices.size());
    Eigen::MatrixXd local(k, static_cast<Eigen::Index>(dim));
    for (Eigen::Index j = 0; j < k; ++j)
        local.row(j) = x.row(static_cast<Eigen::Index>(neighbor_indices[static_cast<std::size_t>(j)])) - x.row(c);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(local, Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    std::size_t rank = 0;
    if (sigma.size() > 0 && sigma[0] > 0.0)
        for (Eigen::Index j = 0; j < sigma.size(); ++j)
            if (sigma[j] > kRelativeCutoff * sigma[0]) ++rank;
    // A flat neighborhood has rank exactly d and a well-defined frame; only
    // rank < d leaves the tangent space undetermined.
    if (rank < d) throw RankDeficientNeighborhood();

    TangentFrame frame;
    frame.origin = x.row(c).transpose();
    const auto& v = svd.matrixV();
    const auto di = static_cast<Eigen::Index>(d);
    frame.tangent_basis = v.leftCols(di).transpose();
    frame.normal_basis = v.rightCols(static_cast<Eigen::Index>(dim) - di).transpose();
    frame.rank = rank;
    return frame;
}

Eigen::VectorXd design_row(std::span<const double> u) {
    const std::size_t d = u.size();
    Eigen::VectorXd row(static_cast<Eigen::Index>(design_width(d)));
    Eigen::Index at = 0;
    for (std::size_t i = 0; i < d; ++i) row[at++] = u[i];
    for (std::size_t i = 0; i < d; ++i) row[at++] = u[i] * u[i];
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) row[at++] = u[i] * u[j];
    return row;
}

HessianSet fit_hessians(const Eigen::MatrixXd& tangent, const Eigen::MatrixXd& normal) {
    const auto k = tangent.rows();
    const auto d = static_cast<std::size_t>(tangent.cols());
    const auto q = static_cast<Eigen::Index>(design_width(d));
    if (normal.rows() != k) throw ArgumentError("tangent and normal coordinates disagree on K");
    if (k < q)
        throw DataError("underdetermined: " + std::to_string(k) + " neighbors for " + std::to_string(q) +
                        " unknowns");

    // Rescale the tangent coordinates to unit radius so linear and quadratic
    // columns are comparable; H is mapped back by 1/scale^2.
    double scale = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) scale = std::max(scale, tangent.row(j).norm());
    if (!(scale > 0.0)) throw DataError("ill-conditioned design: all tangent coordinates are zero");

    Eigen::MatrixXd psi(k, q);
    std::vector<double> u(d);
    for (Eigen::Index j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < d; ++i) u[i] = tangent(j, static_cast<Eigen::Index>(i)) / scale;
        psi.row(j) = design_row(u).transpose();
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(psi, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(kRelativeCutoff);
    if (svd.rank() == 0) throw DataError("ill-conditioned design: every singular value is below the cutoff");
    const Eigen::MatrixXd coeffs = svd.solve(normal); // q x (D - d)

    const auto di = static_cast<Eigen::Index>(d);
    const double back = 1.0 / (scale * scale);
    HessianSet set;
    set.hessians.reserve(static_cast<std::size_t>(normal.cols()));
    for (Eigen::Index a = 0; a < normal.cols(); ++a) {
        Eigen::MatrixXd h(di, di);
        for (Eigen::Index i = 0; i < di; ++i) h(i, i) = 2.0 * coeffs(di + i, a) * back;
        Eigen::Index at = 2 * di;
        for (Eigen::Index i = 0; i < di; ++i)
            for (Eigen::Index j = i + 1; j < di; ++j) {
                h(i, j) = h(j, i) = coeffs(at, a) * back;
                ++at;
            }
        set.hessians.push_back(std::move(h));
    }
    return set;
}

HessianSet estimate_hessians(const TangentFrame& frame, const PointCloud& cloud,
                             std::span<const std::size_t> neighbor_indices) {
    if (static_cast<std::size_t>(frame.origin.size()) != cloud.dim())
        throw ArgumentError("frame and cloud disagree on the ambient dimension");
    const auto k = static_cast<Eigen::Index>(neighbor_indices.size());
    Eigen::MatrixXd local(k, static_cast<Eigen::Index>(cloud.dim()));
    for (Eigen::Index j = 0; j < k; ++j)
        local.row(j) =
            cloud.data().row(static_cast<Eigen::Index>(neighbor_indices[static_cast<std::size_t>(j)])) -
            frame.origin.transpose();
    return fit_hessians(local * frame.tangent_basis.transpose(), local * frame.normal_basis.transpose());
}

std::vector<double> principal_curvatures(const HessianSet& hessians) {
    std::vector<double> out;
    for (const auto& h : hessians.hessians) {
        if (h.rows() != h.cols()) throw ArgumentError("Hessian must be square");
        const double norm = h.norm();
        if (norm > 0.0 && (h - h.transpose()).norm() > 1e-9 * norm) throw ArgumentError("Hessian is not symmetric");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
        const auto& ev = solver.eigenvalues();
        for (Eigen::Index i = ev.size(); i-- > 0;) out.push_back(ev[i]);
    }
    return out;
}

namespace {

struct PointResult {
    bool used = false;
    std::vector<double> curvatures;
    double spanned_mean = 0.0;
};

double mean_abs(std::span<const double> v) {
    std::vector<double> a(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) a[i] = std::abs(v[i]);
    return pairwise_mean(a);
}

} // namespace

std::pair<MapcEstimate, CurvatureSpectrum> manifold_mapc(const PointCloud& cloud, const MapcParams& params) {
    const std::size_t n = cloud.size();
    const std::size_t dim = cloud.dim();
    const std::size_t d = params.d;
    if (d < 1 || d >= dim) throw ArgumentError("intrinsic dimension must satisfy 1 <= d < D");
    const std::size_t q = design_width(d);
    const std::size_t k = params.k_neighbors.value_or(default_neighbors(d));
    if (k < q) throw ArgumentError("k_neighbors must be at least q = " + std::to_string(q));
    if (k > n - 1 || n < 2)
        throw ArgumentError("k_neighbors = " + std::to_string(k) + " needs more than " + std::to_string(n) + " points");

    std::vector<std::size_t> queries;
    if (params.subsample) {
        if (*params.subsample > n) throw ArgumentError("subsample exceeds the number of points");
        queries = sample_without_replacement(n, *params.subsample, params.seed);
    } else {
        queries.resize(n);
        for (std::size_t i = 0; i < n; ++i) queries[i] = i;
    }

    std::vector<PointResult> results(queries.size());
    parallel_for(queries.size(), params.threads, [&](std::size_t p) {
        const auto nb = knn(cloud, queries[p], k);
        TangentFrame frame;
        HessianSet set;
        try {
            frame = build_local_frame(cloud, queries[p], nb.indices, d);
            set = estimate_hessians(frame, cloud, nb.indices);
        } catch (const RankDeficientNeighborhood&) {
            return;
        } catch (const DataError&) {
            return; // ill-conditioned design
        }
        auto& r = results[p];
        r.curvatures = principal_curvatures(set);
        r.used = true;
        const std::size_t spanned = frame.spanned_normals();
        r.spanned_mean = spanned == 0 ? 0.0 : mean_abs(std::span(r.curvatures).first(spanned * d));
    });

    MapcEstimate est;
    CurvatureSpectrum spectrum;
    spectrum.d = d;
    spectrum.D = dim;
    for (std::size_t p = 0; p < results.size(); ++p) {
        auto& r = results[p];
        if (!r.used) {
            ++est.n_points_skipped;
            continue;
        }
        ++est.n_points_used;
        spectrum.point_indices.push_back(queries[p]);
        spectrum.values.insert(spectrum.values.end(), r.curvatures.begin(), r.curvatures.end());
        est.per_point_mapc.push_back(mean_abs(r.curvatures));
        est.per_point_spanned_mapc.push_back(r.spanned_mean);
    }
    if (est.n_points_used == 0) throw DataError("no valid neighborhoods");
    est.mapc = pairwise_mean(est.per_point_mapc);
    est.spanned_mapc = pairwise_mean(est.per_point_spanned_mapc);
    return {std::move(est), std::move(spectrum)};
}

} // namespace mscope
