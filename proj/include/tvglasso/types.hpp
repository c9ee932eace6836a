#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tvglasso {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;
using Index = Eigen::Index;

// true = entry is structurally zero
using MaskArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Thrown on precondition / input validation failures (CLI exit code 2).
struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown on file / parsing failures (CLI exit code 4).
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tvglasso
