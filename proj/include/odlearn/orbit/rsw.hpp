#pragma once

#include "odlearn/orbit/types.hpp"

namespace odlearn::orbit {

/// Decomposes (estimate_position - reference.position) into the reference
/// orbit's radial / along-track / cross-track triad.
/// Throws DomainError when position and velocity are parallel (frame
/// degenerate).
RswError rsw_decompose(const CartesianState& reference,
                       const Eigen::Vector3d& estimate_position_km);

}  // namespace odlearn::orbit
