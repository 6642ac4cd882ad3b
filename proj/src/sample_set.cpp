#include "drcvar/sample_set.hpp"

#include "drcvar/errors.hpp"

namespace drcvar {

SampleSet::SampleSet(Eigen::MatrixXd data) : data_(std::move(data)) {
    if (data_.rows() < 1 || data_.cols() < 1)
        throw InputError("sample set needs at least one row and one column");
    if (!data_.allFinite()) throw InputError("sample set contains non-finite entries");
}

} // namespace drcvar
