#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace lrcs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

// y outside the support of a model, t <= 0 for survival data, etc.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raised when an operation is asked for something it refuses to approximate.
struct UnsupportedModel : std::logic_error {
  using std::logic_error::logic_error;
};

inline void require_dim(Index got, Index want, const char* what) {
  if (got != want)
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(want) +
                         ", got " + std::to_string(got));
}

}  // namespace lrcs
