#pragma once

#include <Eigen/Dense>

#include "gwgl/groups.hpp"

namespace gwgl {

/// Block soft-thresholding: each block is scaled by max(0, 1 - lambda*sqrt(p_l)/||v^l||_2).
Eigen::VectorXd prox_group_l2(const Eigen::Ref<const Eigen::VectorXd>& v, double lambda,
                              const GroupStructure& structure);

/// Block soft-thresholding with an explicit threshold per block.
void prox_group_l2_inplace(Eigen::Ref<Eigen::VectorXd> v, const Eigen::VectorXd& thresholds,
                           const GroupStructure& structure);

}  // namespace gwgl
