#pragma once

#include "odlearn/orbit/types.hpp"

namespace odlearn::orbit {

/// Wraps an angle into [0, 2*pi).
double normalize_angle(double angle_rad);

/// Smallest signed difference a-b on the circle, in (-pi, pi].
double angle_difference(double a_rad, double b_rad);

/// Solves Kepler's equation E - e*sin(E) = M for the eccentric anomaly.
/// Newton iteration with a bisection fallback; residual below 1e-12 rad.
/// Throws ConvergenceError (carrying the final residual) if both fail.
double kepler_solve(double mean_anomaly_rad, double eccentricity);

double eccentric_to_true_anomaly(double eccentric_anomaly_rad, double eccentricity);
double true_to_eccentric_anomaly(double true_anomaly_rad, double eccentricity);

/// Perifocal-to-ECI conversion of classical elements.
CartesianState elements_to_state(const KeplerianElements& elements,
                                 double mu = constants::kMuEarth);

/// Inverse of elements_to_state for bound, non-degenerate orbits.
/// Near-singular cases use a canonical form: e < 1e-8 folds the anomaly into
/// M with arg_perigee = 0; i < 1e-8 sets raan = 0.
/// Throws DomainError for parabolic/hyperbolic states.
KeplerianElements state_to_elements(const CartesianState& state,
                                    double mu = constants::kMuEarth);

/// Orbital period of the ellipse with the given semi-major axis.
double orbital_period(double semi_major_axis_km, double mu = constants::kMuEarth);

}  // namespace odlearn::orbit
