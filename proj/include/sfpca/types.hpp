#pragma once

#include <Eigen/Dense>

namespace sfpca {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

}  // namespace sfpca
