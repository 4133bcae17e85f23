#include "helpers.hpp"

#include "mscope/error.hpp"
#include "mscope/neighborhood_synthesis.hpp"

#include <Eigen/SVD>
#include <doctest.h>

using namespace mscope;
using namespace mscope::testing;

namespace {

SeriesSample random_series(Eigen::Index t, Eigen::Index d, std::uint64_t seed) {
    Rng rng(seed);
    SeriesSample s{Eigen::MatrixXd(t, d)};
    for (Eigen::Index i = 0; i < s.values.size(); ++i) s.values.data()[i] = rng.normal();
    return s;
}

SeriesSample rank_one(Eigen::Index t, Eigen::Index d) {
    return {Eigen::VectorXd::LinSpaced(t, 0.5, 3.0) * Eigen::RowVectorXd::LinSpaced(d, -1.0, 2.0)};
}

// Series with prescribed singular values on random orthonormal factors.
SeriesSample with_singular_values(const std::vector<double>& sigma, Eigen::Index t, Eigen::Index d, std::uint64_t seed) {
    const auto a = random_series(t, t, seed).values;
    const auto b = random_series(d, d, seed + 1).values;
    Eigen::JacobiSVD<Eigen::MatrixXd> sa(a, Eigen::ComputeFullU), sb(b, Eigen::ComputeFullU);
    Eigen::MatrixXd core = Eigen::MatrixXd::Zero(t, d);
    for (std::size_t j = 0; j < sigma.size(); ++j) core(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = sigma[j];
    return {sa.matrixU() * core * sb.matrixU().transpose()};
}

} // namespace

TEST_CASE("mode cutoff") {
    CHECK(mode_cutoff(rank_one(24, 7)) == 2);
    // explained variances 0.99, 0.0095, 0.0005 against 1e-3
    const auto s = with_singular_values({std::sqrt(0.99), std::sqrt(0.0095), std::sqrt(0.0005)}, 10, 3, 4);
    CHECK(mode_cutoff(s, 1e-3) == 3);
    CHECK(mode_cutoff(s, 0.01) == 2);
    // nothing below threshold: no mode damped
    const auto flat = with_singular_values({1.0, 1.0, 1.0}, 6, 3, 9);
    CHECK(mode_cutoff(flat, 1e-3) == 4);
    CHECK(kDefaultEvThreshold == 1e-3);

    CHECK_THROWS_WITH_AS(mode_cutoff({Eigen::MatrixXd::Zero(5, 3)}), "all-zero series", DataError);
    CHECK_THROWS_AS(mode_cutoff(rank_one(5, 3), 0.0), ArgumentError);
    CHECK_THROWS_AS(mode_cutoff({Eigen::MatrixXd::Ones(1, 3)}), ArgumentError);
}

TEST_CASE("rank-one series yields identical copies") {
    const auto s = rank_one(24, 7);
    const auto copies = generate_sv_neighborhood(s, kDefaultCopies, kDefaultEvThreshold, 5);
    CHECK(kDefaultCopies == 64);
    REQUIRE(copies.size() == 64);
    for (const auto& c : copies) CHECK((c.values - s.values).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("copies respect the deviation bound and keep the dominant modes") {
    const auto s = random_series(24, 7, 3);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(s.values, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    // a threshold that damps a few modes of a Gaussian series
    const double threshold = 0.05;
    const std::size_t m = mode_cutoff(s, threshold);
    REQUIRE(m >= 2);
    REQUIRE(m <= 7);
    double bound = 0.0;
    for (Eigen::Index j = static_cast<Eigen::Index>(m) - 1; j < sigma.size(); ++j) bound += sigma[j] * sigma[j];

    const auto copies = generate_sv_neighborhood(s, 64, threshold, 3);
    const auto lead = static_cast<Eigen::Index>(m - 1);
    const Eigen::MatrixXd ul = svd.matrixU().leftCols(lead), vl = svd.matrixV().leftCols(lead);
    const Eigen::MatrixXd proj = ul.transpose() * s.values * vl;
    bool any_changed = false;
    for (const auto& c : copies) {
        CHECK((c.values - s.values).squaredNorm() <= bound * (1 + 1e-12));
        CHECK((ul.transpose() * c.values * vl - proj).norm() <= 1e-9 * proj.norm());
        any_changed = any_changed || (c.values - s.values).norm() > 1e-6;
    }
    CHECK(any_changed);
}

TEST_CASE("copies are deterministic and schedule independent") {
    const auto s = random_series(12, 20, 8); // wide: T < d
    const auto a = generate_sv_neighborhood(s, 16, 0.05, 42, 1);
    const auto b = generate_sv_neighborhood(s, 16, 0.05, 42, 4);
    const auto c = generate_sv_neighborhood(s, 16, 0.05, 43, 1);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].values == b[k].values);
        CHECK(a[k].t_len() == 12);
        CHECK(a[k].n_features() == 20);
    }
    CHECK(a[0].values != c[0].values);
    // copy k depends only on (seed, k)
    const auto longer = generate_sv_neighborhood(s, 20, 0.05, 42, 1);
    CHECK(longer[7].values == a[7].values);
}

TEST_CASE("synthesis errors") {
    CHECK_THROWS_AS(generate_sv_neighborhood({Eigen::MatrixXd::Zero(4, 2)}, 4, 1e-3, 0), DataError);
    CHECK_THROWS_AS(generate_sv_neighborhood(rank_one(4, 2), 0, 1e-3, 0), ArgumentError);
}
