#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>

namespace chebtuck {

using Index = std::int64_t;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Precondition check; documented error cases throw std::invalid_argument.
inline void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace chebtuck
