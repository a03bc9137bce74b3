#pragma once

#include <Eigen/Dense>

namespace mtmv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

} // namespace mtmv
