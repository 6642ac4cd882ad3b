#pragma once

#include <Eigen/Dense>

namespace drcvar {

/// K x N matrix of historical observations; row k is one realization of an
/// N-dimensional random vector. At least one row and one column, all finite.
class SampleSet {
public:
    explicit SampleSet(Eigen::MatrixXd data);

    const Eigen::MatrixXd& data() const noexcept { return data_; }
    Eigen::Index sample_count() const noexcept { return data_.rows(); }
    Eigen::Index dimension() const noexcept { return data_.cols(); }
    auto row(Eigen::Index k) const { return data_.row(k); }

private:
    Eigen::MatrixXd data_;
};

} // namespace drcvar
