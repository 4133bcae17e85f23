#include "helpers.hpp"

#include "mscope/error.hpp"
#include "mscope/id_estimators.hpp"
#include "mscope/synthetic.hpp"

#include <doctest.h>

#include <Eigen/SVD>

using namespace mscope;
using namespace mscope::testing;

TEST_CASE("random orthogonal maps") {
    const auto q = random_orthogonal(7, 3);
    CHECK((q.transpose() * q - Eigen::MatrixXd::Identity(7, 7)).norm() <= 1e-12);
    CHECK(random_orthogonal(7, 3) == q);
    CHECK(random_orthogonal(7, 4) != q);
}

TEST_CASE("sphere points sit at the radius") {
    SynthSpec s;
    s.kind = SynthKind::Sphere;
    s.d = 2;
    s.D = 3;
    s.radius = 1.0;
    s.n_points = 1000;
    s.seed = 5;
    const auto synth = sample(s);
    for (std::size_t i = 0; i < synth.cloud.size(); ++i)
        CHECK(std::abs((synth.cloud.data().row(static_cast<Eigen::Index>(i)).transpose() - synth.offset).norm() - 1.0) <= 1e-12);
}

TEST_CASE("plane covariance has rank d") {
    SynthSpec s;
    s.kind = SynthKind::Plane;
    s.d = 3;
    s.D = 8;
    s.n_points = 400;
    s.seed = 1;
    const auto synth = sample(s);
    const auto& x = synth.cloud.data();
    const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
    svd.setThreshold(1e-10);
    CHECK(svd.rank() == 3);
    // diameter at most 1
    for (Eigen::Index i = 0; i < x.rows(); i += 13)
        for (Eigen::Index j = 0; j < x.rows(); j += 17) CHECK((x.row(i) - x.row(j)).norm() <= 1.0 + 1e-12);
}

TEST_CASE("hypercube coordinates stay in the unit cube") {
    SynthSpec s;
    s.kind = SynthKind::Hypercube;
    s.d = 3;
    s.D = 5;
    s.n_points = 500;
    s.seed = 2;
    const auto synth = sample(s);
    const Eigen::MatrixXd local = (synth.cloud.data().rowwise() - synth.offset.transpose()) * synth.rotation;
    CHECK(local.leftCols(3).minCoeff() >= -1e-12);
    CHECK(local.leftCols(3).maxCoeff() <= 1.0 + 1e-12);
    CHECK(local.rightCols(2).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("embedding is an isometry and seeding is deterministic") {
    SynthSpec s;
    s.kind = SynthKind::QuadraticGraph;
    s.d = 2;
    s.D = 9;
    s.kappa = {3.0, 1.0};
    s.n_points = 200;
    s.seed = 17;
    const auto synth = sample(s);
    const Eigen::MatrixXd local = (synth.cloud.data().rowwise() - synth.offset.transpose()) * synth.rotation;
    for (Eigen::Index i = 0; i < 200; i += 11)
        for (Eigen::Index j = 0; j < 200; j += 7) {
            const double ambient = (synth.cloud.data().row(i) - synth.cloud.data().row(j)).norm();
            CHECK(std::abs(ambient - (local.row(i) - local.row(j)).norm()) <= 1e-9);
        }
    // lifted height matches the planted quadratic
    for (Eigen::Index i = 0; i < 200; i += 9) {
        const double h = 0.5 * (3.0 * local(i, 0) * local(i, 0) + local(i, 1) * local(i, 1));
        CHECK(std::abs(local(i, 2) - h) <= 1e-12);
        CHECK(local.row(i).head(2).norm() <= 0.05 + 1e-12);
    }
    CHECK(sample(s).cloud == synth.cloud);
}

TEST_CASE("invalid specs") {
    SynthSpec s;
    s.kind = SynthKind::Sphere;
    s.d = 2;
    s.D = 2;
    CHECK_THROWS_AS(sample(s), ArgumentError);
    s.D = 3;
    s.radius = 0.0;
    CHECK_THROWS_AS(sample(s), ArgumentError);
    s.kind = SynthKind::QuadraticGraph;
    s.kappa = {1.0};
    CHECK_THROWS_AS(sample(s), ArgumentError);
    s.kind = SynthKind::Hypercube;
    s.n_points = 0;
    CHECK_THROWS_AS(sample(s), ArgumentError);
    CHECK_THROWS_AS(parse_synth_kind("swiss_roll"), ArgumentError);
}

TEST_CASE("layer stacks") {
    std::vector<SynthSpec> specs(3);
    for (std::size_t i = 0; i < 3; ++i) {
        specs[i].kind = SynthKind::Hypercube;
        specs[i].d = i + 1;
        specs[i].D = 12;
        specs[i].n_points = 3000;
        specs[i].seed = i;
    }
    const auto stack = layer_stack(specs);
    REQUIRE(stack.clouds.size() == 3);
    REQUIRE(stack.manifest.layers.size() == 3);
    double previous = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(stack.manifest.layers[i].index == i + 1);
        const double d = twonn_estimate(stack.clouds[i], {}).d_hat;
        CHECK(d > previous);
        previous = d;
    }
    const auto dir = scratch_dir("stack");
    const auto manifest_path = write_layer_stack(stack, dir);
    const auto back = load_manifest(manifest_path);
    CHECK(back.layers.size() == 3);
    CHECK(load_pointcloud(back.layers[2].file) == stack.clouds[2]);

    CHECK(layer_stack({specs[0]}).clouds.size() == 1);
    CHECK_THROWS_AS(layer_stack({}), ArgumentError);
}
