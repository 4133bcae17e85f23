#include "helpers.hpp"

#include "mscope/curvature.hpp"
#include "mscope/neighbors.hpp"
#include "mscope/synthetic.hpp"

#include <doctest.h>

#include <Eigen/SVD>

#include <cmath>

using namespace mscope;
using namespace mscope::testing;

namespace {

// Largest principal angle between the row spaces of a and b (orthonormal rows).
double max_principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a * b.transpose());
    const double smallest_cos = std::min(1.0, svd.singularValues().minCoeff());
    return std::acos(smallest_cos);
}

PointCloud xy_plane_points(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    RowMatrix m(static_cast<Eigen::Index>(n), 3);
    for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) << rng.uniform() - 0.5, rng.uniform() - 0.5, 0.0;
    return PointCloud(m);
}

std::vector<std::size_t> iota_from(std::size_t first, std::size_t last) {
    std::vector<std::size_t> v;
    for (std::size_t i = first; i < last; ++i) v.push_back(i);
    return v;
}

} // namespace

TEST_CASE("design row layout") {
    const double u2[] = {2.0, -3.0};
    Eigen::VectorXd row = design_row(u2);
    CHECK(row.size() == 5);
    CHECK(row[0] == 2.0);
    CHECK(row[1] == -3.0);
    CHECK(row[2] == 4.0);
    CHECK(row[3] == 9.0);
    CHECK(row[4] == -6.0);

    const double u3[] = {1.0, 2.0, 3.0};
    const Eigen::VectorXd r3 = design_row(u3);
    const Eigen::VectorXd expected = (Eigen::VectorXd(9) << 1, 2, 3, 1, 4, 9, 2, 3, 6).finished();
    CHECK(r3 == expected);

    const double zero[] = {0.0, 0.0, 0.0, 0.0};
    CHECK(design_row(zero).size() == static_cast<Eigen::Index>(design_width(4)));
    CHECK(design_row(zero).isZero(0.0));
    CHECK(design_width(2) == 5);
    CHECK(default_neighbors(2) == 15);
    CHECK(default_neighbors(1) == 12);
    CHECK(default_neighbors(8) == 88);
}

TEST_CASE("local frame of a flat patch") {
    const auto cloud = xy_plane_points(21, 3);
    const auto nb = iota_from(1, 21);
    const auto frame = build_local_frame(cloud, 0, nb, 2);
    CHECK(frame.tangent_basis.rows() == 2);
    CHECK(frame.normal_basis.rows() == 1);
    CHECK(frame.rank == 2);
    const Eigen::MatrixXd e12 = (Eigen::MatrixXd(2, 3) << 1, 0, 0, 0, 1, 0).finished();
    const Eigen::MatrixXd e3 = (Eigen::MatrixXd(1, 3) << 0, 0, 1).finished();
    CHECK(max_principal_angle(frame.tangent_basis, e12) <= 1e-9);
    CHECK(max_principal_angle(frame.normal_basis, e3) <= 1e-9);

    Eigen::MatrixXd all(3, 3);
    all << frame.tangent_basis, frame.normal_basis;
    CHECK((all * all.transpose() - Eigen::MatrixXd::Identity(3, 3)).norm() <= 1e-9);

    SUBCASE("rotated copy gives the rotated spans") {
        const auto q = random_orthogonal(3, 12);
        const auto moved = rigid_motion(cloud, q, Eigen::Vector3d(1, -2, 0.5));
        const auto f2 = build_local_frame(moved, 0, nb, 2);
        CHECK(max_principal_angle(f2.tangent_basis, e12 * q.transpose()) <= 1e-9);
        CHECK(max_principal_angle(f2.normal_basis, e3 * q.transpose()) <= 1e-9);
    }
}

TEST_CASE("collinear neighborhood is skipped for d = 2") {
    RowMatrix m(10, 3);
    for (int i = 0; i < 10; ++i) m.row(i) << i, 2.0 * i, -i;
    const auto nb = iota_from(1, 10);
    CHECK_THROWS_WITH_AS(build_local_frame(PointCloud(m), 0, nb, 2), "skipped: rank", RankDeficientNeighborhood);
    CHECK_NOTHROW(build_local_frame(PointCloud(m), 0, nb, 1));
}

TEST_CASE("Hessian recovery on an exact quadratic") {
    // f(u) = 1/2 u^T diag(2, -1) u over a disc
    Rng rng(5);
    const int k = 30;
    Eigen::MatrixXd tangent(k, 2), normal(k, 1);
    for (int j = 0; j < k; ++j) {
        const double r = 0.1 * std::sqrt(rng.uniform()), a = 2 * M_PI * rng.uniform();
        tangent.row(j) << r * std::cos(a), r * std::sin(a);
        normal(j, 0) = 0.5 * (2.0 * tangent(j, 0) * tangent(j, 0) - tangent(j, 1) * tangent(j, 1));
    }
    const auto set = fit_hessians(tangent, normal);
    REQUIRE(set.hessians.size() == 1);
    CHECK(set.gradients_discarded);
    const Eigen::Matrix2d planted = (Eigen::Matrix2d() << 2, 0, 0, -1).finished();
    CHECK((set.hessians[0] - planted).norm() <= 1e-8);
    const auto kappa = principal_curvatures(set);
    REQUIRE(kappa.size() == 2);
    CHECK(kappa[0] == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(kappa[1] == doctest::Approx(-1.0).epsilon(1e-8));

    SUBCASE("with a linear term and a full off-diagonal Hessian") {
        const Eigen::Matrix2d h = (Eigen::Matrix2d() << 1.5, 0.7, 0.7, -0.4).finished();
        for (int j = 0; j < k; ++j) {
            const Eigen::Vector2d u = tangent.row(j).transpose();
            normal(j, 0) = 0.3 * u[0] - 0.2 * u[1] + 0.5 * u.dot(h * u);
        }
        CHECK((fit_hessians(tangent, normal).hessians[0] - h).norm() <= 1e-8 * h.norm());
    }
    SUBCASE("flat sheet") {
        const auto flat = fit_hessians(tangent, Eigen::MatrixXd::Zero(k, 3));
        REQUIRE(flat.hessians.size() == 3);
        for (const auto& m : flat.hessians) CHECK(m.norm() <= 1e-10);
    }
    SUBCASE("underdetermined") {
        CHECK_THROWS_AS(fit_hessians(tangent.topRows(4), normal.topRows(4)), DataError);
    }
}

TEST_CASE("estimate_hessians through an exact frame on a quadratic graph") {
    SynthSpec s;
    s.kind = SynthKind::QuadraticGraph;
    s.d = 2;
    s.D = 6;
    s.kappa = {3.0, 1.0};
    s.rho = 0.05;
    s.n_points = 400;
    s.seed = 2;
    const auto synth = sample(s);
    // frame at the apex from the known embedding
    TangentFrame frame;
    frame.origin = synth.offset;
    frame.tangent_basis = synth.rotation.leftCols(2).transpose();
    frame.normal_basis = synth.rotation.rightCols(4).transpose();
    frame.rank = 3;
    RowMatrix with_apex(synth.cloud.size() + 1, 6);
    with_apex.topRows(synth.cloud.size()) = synth.cloud.data();
    with_apex.bottomRows(1) = synth.offset.transpose();
    const PointCloud cloud(with_apex);
    const auto nb = knn(cloud, synth.cloud.size(), 20).indices;
    const auto set = estimate_hessians(frame, cloud, nb);
    REQUIRE(set.hessians.size() == 4);
    const Eigen::Matrix2d planted = (Eigen::Matrix2d() << 3, 0, 0, 1).finished();
    CHECK((set.hessians[0] - planted).norm() <= 1e-6 * planted.norm());
    for (int a = 1; a < 4; ++a) CHECK(set.hessians[static_cast<std::size_t>(a)].norm() <= 1e-6);
}

TEST_CASE("principal curvatures") {
    HessianSet one;
    one.hessians = {(Eigen::MatrixXd(2, 2) << 2, 0, 0, -1).finished()};
    CHECK(principal_curvatures(one) == std::vector<double>{2.0, -1.0});

    HessianSet scalars;
    scalars.hessians = {Eigen::MatrixXd::Constant(1, 1, 0.5), Eigen::MatrixXd::Constant(1, 1, -0.5)};
    CHECK(principal_curvatures(scalars) == std::vector<double>{0.5, -0.5});

    HessianSet asym;
    asym.hessians = {(Eigen::MatrixXd(2, 2) << 1, 1, 0, 1).finished()};
    CHECK_THROWS_AS(principal_curvatures(asym), ArgumentError);
}

TEST_CASE("caml dimension rounding") {
    CHECK(caml_dimension(1.679, 10) == 2);
    CHECK(caml_dimension(0.2, 10) == 1);
    CHECK(caml_dimension(2.5, 10) == 3);
    CHECK(caml_dimension(12.0, 10) == 9);
}

TEST_CASE("MAPC of S^2(2) in R^3") {
    SynthSpec s;
    s.kind = SynthKind::Sphere;
    s.d = 2;
    s.D = 3;
    s.radius = 2.0;
    s.n_points = 20000;
    s.seed = 1;
    const auto cloud = sample(s).cloud;
    MapcParams p;
    p.d = 2;
    p.subsample = 2000;
    p.seed = 3;
    const auto [est, spectrum] = manifold_mapc(cloud, p);
    CHECK(est.mapc >= 0.45);
    CHECK(est.mapc <= 0.55);
    CHECK(est.n_points_used + est.n_points_skipped == 2000);
    CHECK(spectrum.width() == 2);
    CHECK(spectrum.values.size() == 2 * est.n_points_used);
    // every |kappa| near 1/r
    std::size_t near = 0;
    for (double k : spectrum.values) near += std::abs(std::abs(k) - 0.5) < 0.05;
    CHECK(near >= spectrum.values.size() * 95 / 100);
    double plain = 0.0;
    for (double v : est.per_point_mapc) plain += v;
    CHECK(std::abs(est.mapc - plain / static_cast<double>(est.per_point_mapc.size())) <= 1e-12);
    CHECK(est.spanned_mapc == doctest::Approx(est.mapc).epsilon(1e-12));
}

TEST_CASE("flat manifold has vanishing MAPC") {
    SynthSpec s;
    s.kind = SynthKind::Plane;
    s.d = 2;
    s.D = 5;
    s.n_points = 20000;
    s.seed = 6;
    MapcParams p;
    p.d = 2;
    p.subsample = 1000;
    const auto [est, spectrum] = manifold_mapc(sample(s).cloud, p);
    CHECK(est.mapc <= 1e-4);
    CHECK(est.n_points_skipped == 0);
    CHECK(spectrum.width() == 6);
}

TEST_CASE("manifold_mapc preconditions and skip accounting") {
    const auto cloud = random_cloud(50, 4, 1);
    MapcParams p;
    p.d = 4;
    CHECK_THROWS_AS(manifold_mapc(cloud, p), ArgumentError);
    p.d = 2;
    p.k_neighbors = 4;
    CHECK_THROWS_AS(manifold_mapc(cloud, p), ArgumentError);
    p.k_neighbors = 50;
    CHECK_THROWS_AS(manifold_mapc(cloud, p), ArgumentError);

    // all neighborhoods collinear: every point skipped
    RowMatrix line(40, 3);
    for (int i = 0; i < 40; ++i) line.row(i) << i, i, i;
    MapcParams q;
    q.d = 2;
    CHECK_THROWS_WITH_AS(manifold_mapc(PointCloud(line), q), "no valid neighborhoods", DataError);
}

TEST_CASE("count contract and thread independence") {
    const auto cloud = random_cloud(300, 5, 4);
    MapcParams p;
    p.d = 2;
    p.threads = 1;
    const auto [a, sa] = manifold_mapc(cloud, p);
    p.threads = 4;
    const auto [b, sb] = manifold_mapc(cloud, p);
    CHECK(a.mapc == b.mapc);
    CHECK(sa.values == sb.values);
    CHECK(sa.values.size() == a.n_points_used * 2 * 3);
}
