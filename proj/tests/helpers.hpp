#pragma once

#include "mscope/point_cloud.hpp"
#include "mscope/rng.hpp"

#include <filesystem>
#include <initializer_list>
#include <string>

namespace mscope::testing {

inline PointCloud cloud_of(std::initializer_list<std::initializer_list<double>> rows) {
    RowMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index r = 0;
    for (const auto& row : rows) {
        Eigen::Index c = 0;
        for (double v : row) m(r, c++) = v;
        ++r;
    }
    return PointCloud(std::move(m));
}

inline PointCloud random_cloud(std::size_t n, std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    RowMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
    return PointCloud(std::move(m));
}

/// Applies x -> R x + t to every row.
inline PointCloud rigid_motion(const PointCloud& cloud, const Eigen::MatrixXd& rotation, const Eigen::VectorXd& shift) {
    RowMatrix m = cloud.data() * rotation.transpose();
    m.rowwise() += shift.transpose();
    return PointCloud(std::move(m), cloud.label());
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("mscope_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string data_path(const std::string& file) { return std::string(MSCOPE_TEST_DATA) + "/" + file; }

} // namespace mscope::testing
