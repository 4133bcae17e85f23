#pragma once

#include "mscope/error.hpp"
#include "mscope/point_cloud.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace mscope {

/// Neighborhood too degenerate for a d-dimensional frame. manifold_mapc
/// counts these points as skipped instead of failing.
class RankDeficientNeighborhood : public DataError {
public:
    RankDeficientNeighborhood() : DataError("skipped: rank") {}
};

/// Relative singular-value cutoff used for both the rank test and the pseudoinverse.
inline constexpr double kRelativeCutoff = 1e-10;

/**
 * Orthonormal frame at a sample point. Tangent rows are the d leading right
 * singular directions of the point-centered neighborhood; normal rows are the
 * remaining D - d, ordered by decreasing singular value.
 */
struct TangentFrame {
    Eigen::VectorXd origin;
    Eigen::MatrixXd tangent_basis; ///< d x D
    Eigen::MatrixXd normal_basis;  ///< (D - d) x D
    /// Numerical rank of the centered neighborhood.
    std::size_t rank = 0;

    std::size_t intrinsic_dim() const { return static_cast<std::size_t>(tangent_basis.rows()); }
    std::size_t ambient_dim() const { return static_cast<std::size_t>(origin.size()); }
    /// Normal directions along which the neighborhood has nonzero extent.
    std::size_t spanned_normals() const {
        const std::size_t d = intrinsic_dim();
        return std::min(rank > d ? rank - d : 0, ambient_dim() - d);
    }
};

struct HessianSet {
    /// One symmetric d x d matrix per normal direction.
    std::vector<Eigen::MatrixXd> hessians;
    /// The fitted gradients are never kept.
    bool gradients_discarded = true;
};

/// Per-point principal curvatures, d * (D - d) values for every analysed point.
struct CurvatureSpectrum {
    std::size_t d = 0;
    std::size_t D = 0;
    /// Cloud row of each analysed point.
    std::vector<std::size_t> point_indices;
    /// Row-major: point p owns values[p * width(), (p + 1) * width()).
    std::vector<double> values;

    std::size_t width() const { return d * (D - d); }
    std::size_t n_points() const { return point_indices.size(); }
    std::span<const double> point(std::size_t p) const { return {values.data() + p * width(), width()}; }
};

struct MapcEstimate {
    double mapc = 0.0;
    std::vector<double> per_point_mapc;
    std::size_t n_points_used = 0;
    std::size_t n_points_skipped = 0;
    /**
     * Mean |kappa| restricted to the normal directions the neighborhood spans
     * (per point, then over points). Normal directions with zero extent carry
     * identically zero Hessians; for S^d(r) in any R^D this equals 1/r while
     * `mapc` is diluted by the codimension.
     */
    double spanned_mapc = 0.0;
    std::vector<double> per_point_spanned_mapc;
};

struct MapcParams {
    std::size_t d = 1;
    std::optional<std::size_t> k_neighbors;
    /// Number of query points; neighbors are always searched in the full cloud.
    std::optional<std::size_t> subsample;
    std::uint64_t seed = 0;
    int threads = 1;
};

/// q = d + d(d+1)/2 unknowns per normal direction (gradient, squares, cross terms).
constexpr std::size_t design_width(std::size_t d) { return d + d * (d + 1) / 2; }

/// Default neighborhood size max(2q, q + 10).
constexpr std::size_t default_neighbors(std::size_t d) {
    const std::size_t q = design_width(d);
    return std::max(2 * q, q + 10);
}

/// Integer dimension for CAML from a TwoNN estimate: rounded, at least 1, below D.
std::size_t caml_dimension(double d_hat, std::size_t ambient_dim);

TangentFrame build_local_frame(const PointCloud& cloud, std::size_t center_index,
                               std::span<const std::size_t> neighbor_indices, std::size_t d);

/// [u^1..u^d, (u^1)^2..(u^d)^2, u^1 u^2, u^1 u^3, .., u^{d-1} u^d].
Eigen::VectorXd design_row(std::span<const double> u);

/**
 * Least-squares fit of f^alpha(u) = grad . u + 1/2 u^T H^alpha u for every
 * normal direction. `tangent` is K x d, `normal` is K x (D - d), both in
 * frame coordinates relative to the center point.
 */
HessianSet fit_hessians(const Eigen::MatrixXd& tangent, const Eigen::MatrixXd& normal);

HessianSet estimate_hessians(const TangentFrame& frame, const PointCloud& cloud,
                             std::span<const std::size_t> neighbor_indices);

/// Eigenvalues of every Hessian, each block sorted descending.
std::vector<double> principal_curvatures(const HessianSet& hessians);

std::pair<MapcEstimate, CurvatureSpectrum> manifold_mapc(const PointCloud& cloud, const MapcParams& params);

} // namespace mscope
