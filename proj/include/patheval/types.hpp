#pragma once

#include <Eigen/Dense>

namespace patheval {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Row-major storage for frame-by-feature data (spectrogram rows, posteriorgram
// frames) so that one frame is contiguous.
template <typename Scalar>
using FrameMatrix =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;
using FrameMatrixXd = FrameMatrix<double>;

}  // namespace patheval
