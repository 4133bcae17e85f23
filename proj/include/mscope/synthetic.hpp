#pragma once

#include "mscope/manifest.hpp"
#include "mscope/point_cloud.hpp"
#include "mscope/tensor_io.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mscope {

enum class SynthKind { Hypercube, Sphere, QuadraticGraph, Plane };

std::string_view to_string(SynthKind kind);
SynthKind parse_synth_kind(std::string_view name);

/**
 * Ground-truth manifold sample.
 *
 *  - Hypercube: uniform in [0, 1]^d.
 *  - Sphere: uniform on S^d(radius) in R^{d+1}.
 *  - QuadraticGraph: u uniform in the d-ball of radius `rho`, lifted to
 *    (u, 1/2 sum kappa_i u_i^2); the principal curvatures at u = 0 are kappa.
 *  - Plane: uniform in a d-ball of diameter 1.
 *
 * The intrinsic coordinates are then mapped into R^D by a seeded random
 * orthogonal matrix plus a translation.
 */
struct SynthSpec {
    SynthKind kind = SynthKind::Hypercube;
    std::size_t d = 2;
    std::size_t D = 3;
    double radius = 1.0;
    std::vector<double> kappa;
    double rho = 0.05;
    std::size_t n_points = 1000;
    std::uint64_t seed = 0;
};

void validate_synth_spec(const SynthSpec& spec);

struct SynthCloud {
    PointCloud cloud;
    Eigen::MatrixXd rotation; ///< D x D orthogonal
    Eigen::VectorXd offset;   ///< D

    /// Ambient image of intrinsic-space coordinates (zero-padded to D).
    Eigen::VectorXd embed(const Eigen::VectorXd& local) const;
};

/// Q from the QR factorization of a seeded Gaussian matrix, signs fixed so R has a positive diagonal.
Eigen::MatrixXd random_orthogonal(std::size_t dim, std::uint64_t seed);

SynthCloud sample(const SynthSpec& spec);

struct LayerStack {
    std::vector<PointCloud> clouds;
    RunManifest manifest;
};

/// Clouds for layers 1..L plus a manifest naming them layer_<i>.gatm.
LayerStack layer_stack(const std::vector<SynthSpec>& specs);

/// Writes every cloud and `manifest.json` into `dir`; returns the manifest path.
std::filesystem::path write_layer_stack(const LayerStack& stack, const std::filesystem::path& dir,
                                        DType dtype = DType::F64);

} // namespace mscope
