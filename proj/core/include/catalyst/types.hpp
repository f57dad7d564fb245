// Common dense linear-algebra aliases used throughout the library.
#pragma once

#include <Eigen/Core>

namespace catalyst {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace catalyst
