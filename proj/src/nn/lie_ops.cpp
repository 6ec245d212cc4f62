#include "motiongen/nn/lie_ops.hpp"

#include "motiongen/common.hpp"

namespace motiongen::nn {

Tensor fk_offsets(Tensor omega, std::shared_ptr<const lie::Skeleton> skeleton) {
  const int n = skeleton->bone_count();
  const int j = skeleton->joint_count();
  if (omega.cols() != 3 * n) {
    throw ValidationError("fk_offsets: expected " + std::to_string(3 * n) +
                          " columns, got " + std::to_string(omega.cols()));
  }
  Matrix positions(omega.rows(), 3 * j);
  Eigen::VectorXd row_out;
  for (int r = 0; r < omega.rows(); ++r) {
    lie::forward_kinematics_flat(omega.value().row(r).transpose(),
                                 Eigen::Vector3d::Zero(), *skeleton, row_out);
    positions.row(r) = row_out.transpose();
  }
  const bool rg = omega.requires_grad();
  Tensor out = Tensor::from_matrix(std::move(positions), rg);
  if (rg && active_tape()) {
    active_tape()->push("fk_offsets", {omega}, out, [omega, out, skeleton]() mutable {
      Eigen::VectorXd grad_omega;
      Eigen::Vector3d grad_root;
      for (int r = 0; r < omega.rows(); ++r) {
        lie::forward_kinematics_pullback(omega.value().row(r).transpose(), *skeleton,
                                         out.grad().row(r).transpose(), grad_omega,
                                         grad_root);
        omega.grad().row(r) += grad_omega.transpose();
      }
    });
  }
  return out;
}

}  // namespace motiongen::nn
