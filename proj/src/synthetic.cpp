#include "mscope/synthetic.hpp"

#include "mscope/error.hpp"
#include "mscope/rng.hpp"
#include "mscope/tensor_io.hpp"

#include <Eigen/QR>

#include <cmath>
#include <string>

namespace mscope {

namespace {
constexpr std::uint64_t kPointStream = 0;
constexpr std::uint64_t kRotationStream = 1;
constexpr std::uint64_t kOffsetStream = 2;

std::size_t local_dim(const SynthSpec& spec) {
    switch (spec.kind) {
    case SynthKind::Sphere:
    case SynthKind::QuadraticGraph:
        return spec.d + 1;
    default:
        return spec.d;
    }
}
} // namespace

std::string_view to_string(SynthKind kind) {
    switch (kind) {
    case SynthKind::Hypercube: return "hypercube";
    case SynthKind::Sphere: return "sphere";
    case SynthKind::QuadraticGraph: return "quadratic_graph";
    case SynthKind::Plane: return "plane";
    }
    return "unknown";
}

SynthKind parse_synth_kind(std::string_view name) {
    if (name == "hypercube") return SynthKind::Hypercube;
    if (name == "sphere") return SynthKind::Sphere;
    if (name == "quadratic_graph") return SynthKind::QuadraticGraph;
    if (name == "plane") return SynthKind::Plane;
    throw ArgumentError("unknown manifold kind '" + std::string(name) + "'");
}

void validate_synth_spec(const SynthSpec& spec) {
    if (spec.d < 1) throw ArgumentError("intrinsic dimension must be at least 1");
    if (spec.d >= spec.D) throw ArgumentError("intrinsic dimension must be below the ambient dimension");
    if (local_dim(spec) > spec.D)
        throw ArgumentError(std::string(to_string(spec.kind)) + " needs an ambient dimension of at least d+1");
    if (spec.n_points < 1) throw ArgumentError("n_points must be at least 1");
    if (spec.kind == SynthKind::Sphere && !(spec.radius > 0.0)) throw ArgumentError("sphere radius must be positive");
    if (spec.kind == SynthKind::QuadraticGraph) {
        if (spec.kappa.size() != spec.d) throw ArgumentError("kappa needs exactly d entries");
        if (!(spec.rho > 0.0)) throw ArgumentError("rho must be positive");
    }
}

Eigen::MatrixXd random_orthogonal(std::size_t dim, std::uint64_t seed) {
    const auto n = static_cast<Eigen::Index>(dim);
    Rng rng(seed, kRotationStream);
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    return q;
}

Eigen::VectorXd SynthCloud::embed(const Eigen::VectorXd& local) const {
    return rotation.leftCols(local.size()) * local + offset;
}

SynthCloud sample(const SynthSpec& spec) {
    validate_synth_spec(spec);
    const auto n = static_cast<Eigen::Index>(spec.n_points);
    const auto d = static_cast<Eigen::Index>(spec.d);
    const auto m = static_cast<Eigen::Index>(local_dim(spec));

    Rng rng(spec.seed, kPointStream);
    // Uniform direction times radius * U^(1/d) gives a uniform point in the d-ball.
    auto ball = [&](double r) {
        Eigen::VectorXd v(d);
        for (Eigen::Index i = 0; i < d; ++i) v[i] = rng.normal();
        const double norm = v.norm();
        return Eigen::VectorXd(v * (r * std::pow(rng.uniform(), 1.0 / static_cast<double>(d)) / norm));
    };

    Eigen::MatrixXd local(n, m);
    for (Eigen::Index p = 0; p < n; ++p) {
        switch (spec.kind) {
        case SynthKind::Hypercube:
            for (Eigen::Index i = 0; i < d; ++i) local(p, i) = rng.uniform();
            break;
        case SynthKind::Plane:
            local.row(p) = ball(0.5).transpose();
            break;
        case SynthKind::Sphere: {
            Eigen::VectorXd v(m);
            double norm = 0.0;
            while (norm == 0.0) {
                for (Eigen::Index i = 0; i < m; ++i) v[i] = rng.normal();
                norm = v.norm();
            }
            local.row(p) = (v * (spec.radius / norm)).transpose();
            break;
        }
        case SynthKind::QuadraticGraph: {
            const Eigen::VectorXd u = ball(spec.rho);
            double height = 0.0;
            for (Eigen::Index i = 0; i < d; ++i) height += 0.5 * spec.kappa[static_cast<std::size_t>(i)] * u[i] * u[i];
            local.row(p).head(d) = u.transpose();
            local(p, d) = height;
            break;
        }
        }
    }

    SynthCloud out;
    out.rotation = random_orthogonal(spec.D, spec.seed);
    Rng offset_rng(spec.seed, kOffsetStream);
    out.offset.resize(static_cast<Eigen::Index>(spec.D));
    for (Eigen::Index i = 0; i < out.offset.size(); ++i) out.offset[i] = offset_rng.normal();

    RowMatrix ambient = local * out.rotation.leftCols(m).transpose();
    ambient.rowwise() += out.offset.transpose();
    out.cloud = PointCloud(std::move(ambient), std::string(to_string(spec.kind)));
    return out;
}

LayerStack layer_stack(const std::vector<SynthSpec>& specs) {
    if (specs.empty()) throw ArgumentError("layer stack needs at least one spec");
    LayerStack stack;
    stack.manifest.model = "synthetic";
    stack.manifest.dataset = "synthetic";
    for (std::size_t i = 0; i < specs.size(); ++i) {
        auto cloud = sample(specs[i]).cloud;
        const std::string name = "layer_" + std::to_string(i + 1);
        cloud.set_label(name);
        stack.clouds.push_back(std::move(cloud));
        stack.manifest.layers.push_back({i + 1, name, name + ".gatm"});
    }
    return stack;
}

std::filesystem::path write_layer_stack(const LayerStack& stack, const std::filesystem::path& dir, DType dtype) {
    std::filesystem::create_directories(dir);
    RunManifest manifest = stack.manifest;
    for (std::size_t i = 0; i < stack.clouds.size(); ++i) {
        save_pointcloud(stack.clouds[i], dir / manifest.layers[i].file, dtype);
        manifest.layers[i].file = dir / manifest.layers[i].file;
    }
    const auto path = dir / "manifest.json";
    save_manifest(manifest, path);
    return path;
}

} // namespace mscope
