#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <string>

namespace mscope {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/**
 * N x D sample of points, one row per point. Values are always held in f64,
 * whatever precision the file on disk used.
 *
 * Construction validates the invariants: at least one point, at least one
 * coordinate and no NaN/Inf entries.
 */
class PointCloud {
public:
    PointCloud() = default;
    explicit PointCloud(RowMatrix data, std::string label = {});

    std::size_t size() const { return static_cast<std::size_t>(data_.rows()); }
    std::size_t dim() const { return static_cast<std::size_t>(data_.cols()); }
    bool empty() const { return data_.rows() == 0; }

    const RowMatrix& data() const { return data_; }
    const std::string& label() const { return label_; }
    void set_label(std::string label) { label_ = std::move(label); }

    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * dim(), dim()};
    }

    /// Rows `indices` (in the given order) as a new cloud with the same label.
    PointCloud select(std::span<const std::size_t> indices) const;

    friend bool operator==(const PointCloud& a, const PointCloud& b) {
        return a.data_.rows() == b.data_.rows() && a.data_.cols() == b.data_.cols() &&
               a.data_ == b.data_;
    }

private:
    RowMatrix data_;
    std::string label_;
};

} // namespace mscope
