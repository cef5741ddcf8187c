#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace pmor {

using Complex = std::complex<double>;
using Index = Eigen::Index;

/// Column-major complex block; holds right-hand sides, solution blocks and bases.
using DenseBlock = Eigen::MatrixXcd;
using DenseMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pmor
