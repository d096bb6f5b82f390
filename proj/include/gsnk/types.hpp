#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace gsnk {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Ordered list of row indices. Most producers return it sorted ascending.
using IndexSet = std::vector<Index>;

}  // namespace gsnk
