#pragma once

#include <Eigen/Core>

namespace l0forge {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

}  // namespace l0forge
