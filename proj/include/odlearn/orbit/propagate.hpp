#pragma once

#include <span>
#include <vector>

#include "odlearn/orbit/types.hpp"

namespace odlearn::orbit {

/// Adaptive step control for the embedded RK4(5) integrator.
struct IntegratorOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;   // km and km/s mixed state norm
  double max_step_s = 60.0;
  double min_step_s = 1e-10;
};

/// Total inertial acceleration at (position, epoch): point mass + zonals +
/// third bodies from the force model.
Eigen::Vector3d acceleration(const Eigen::Vector3d& position_km, double epoch_s,
                             const ForceModel& force_model);

/// Differential third-body perturbation mu*(d/|d|^3 - s/|s|^3) with
/// d = body - spacecraft and s = body (both geocentric).
/// Throws DomainError when the spacecraft sits at the body's center.
Eigen::Vector3d third_body_acceleration(const Eigen::Vector3d& position_km,
                                        const Eigen::Vector3d& body_position_km, double mu_body);

/// Propagates the state to each target epoch (sorted, all >= state.epoch)
/// with a Dormand-Prince 5(4) embedded pair.
/// Throws IntegrationError (carrying the last good epoch) on step underflow.
std::vector<CartesianState> propagate(const CartesianState& state, const ForceModel& force_model,
                                      std::span<const double> target_epochs_s,
                                      const IntegratorOptions& options = {});

/// Single-target convenience wrapper.
CartesianState propagate_to(const CartesianState& state, const ForceModel& force_model,
                            double target_epoch_s, const IntegratorOptions& options = {});

}  // namespace odlearn::orbit
