#include "odlearn/orbit/rsw.hpp"

#include "odlearn/common/error.hpp"

namespace odlearn::orbit {

RswError rsw_decompose(const CartesianState& reference,
                       const Eigen::Vector3d& estimate_position_km) {
  const Eigen::Vector3d r = reference.position_km;
  const Eigen::Vector3d v = reference.velocity_km_s;
  const double r_norm = r.norm();
  if (r_norm <= 0.0) throw DomainError("rsw_decompose: zero reference position");

  const Eigen::Vector3d w = r.cross(v);
  const double w_norm = w.norm();
  if (w_norm <= 1e-12 * r_norm * v.norm() || w_norm == 0.0) {
    throw DomainError("rsw_decompose: position parallel to velocity, frame degenerate");
  }

  const Eigen::Vector3d r_hat = r / r_norm;
  const Eigen::Vector3d w_hat = w / w_norm;
  const Eigen::Vector3d s_hat = w_hat.cross(r_hat);  // completes right-handed R,S,W

  const Eigen::Vector3d error = estimate_position_km - r;
  RswError out;
  out.radial_km = error.dot(r_hat);
  out.along_track_km = error.dot(s_hat);
  out.cross_track_km = error.dot(w_hat);
  out.total_km = error.norm();
  return out;
}

}  // namespace odlearn::orbit
