#pragma once

#include <Eigen/Dense>

namespace colsafe {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using RowVec2 = Eigen::RowVector2d;

using AgentId = int;
using ObstacleId = int;

}  // namespace colsafe
