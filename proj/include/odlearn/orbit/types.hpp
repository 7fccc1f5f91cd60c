#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <vector>

namespace odlearn::orbit {

namespace constants {
// WGS-84-class Earth values.
inline constexpr double kMuEarth = 398600.4418;  // km^3/s^2
inline constexpr double kEarthRadiusKm = 6378.137;
inline constexpr double kJ2 = 1.08263e-3;
inline constexpr double kJ3 = -2.532e-6;
inline constexpr double kJ4 = -1.62e-6;
inline constexpr double kMuMoon = 4902.8;  // km^3/s^2
inline constexpr double kMoonDistanceKm = 384400.0;
inline constexpr double kMoonPeriodS = 27.32 * 86400.0;
inline constexpr double kSpeedOfLightKmS = 299792.458;
inline constexpr double kEarthRotationRateRadS = 7.2921158553e-5;
}  // namespace constants

/// Classical Keplerian elements at an epoch (angles in radians, a in km).
struct KeplerianElements {
  double semi_major_axis_km = 0.0;
  double eccentricity = 0.0;
  double inclination_rad = 0.0;
  double raan_rad = 0.0;
  double arg_perigee_rad = 0.0;
  double mean_anomaly_rad = 0.0;
  double epoch_s = 0.0;

  Eigen::Matrix<double, 6, 1> as_vector() const {
    Eigen::Matrix<double, 6, 1> v;
    v << semi_major_axis_km, eccentricity, inclination_rad, raan_rad, arg_perigee_rad,
        mean_anomaly_rad;
    return v;
  }
};

/// Earth-centered inertial position/velocity at an epoch.
struct CartesianState {
  Eigen::Vector3d position_km = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity_km_s = Eigen::Vector3d::Zero();
  double epoch_s = 0.0;

  Eigen::Matrix<double, 6, 1> as_vector() const {
    Eigen::Matrix<double, 6, 1> v;
    v << position_km, velocity_km_s;
    return v;
  }
  static CartesianState from_vector(const Eigen::Matrix<double, 6, 1>& v, double epoch_s) {
    return CartesianState{v.head<3>(), v.tail<3>(), epoch_s};
  }
};

/// Analytic circular orbit for a perturbing body (the Moon here).
/// Position traces a circle of given radius in a plane set by
/// inclination/raan, starting from initial_phase at epoch 0.
struct CircularEphemeris {
  double radius_km = constants::kMoonDistanceKm;
  double angular_rate_rad_s = 2.0 * M_PI / constants::kMoonPeriodS;
  double initial_phase_rad = 0.0;
  double inclination_rad = 0.0;
  double raan_rad = 0.0;

  Eigen::Vector3d position_at(double epoch_s) const;
};

struct ThirdBody {
  double mu = constants::kMuMoon;  // km^3/s^2
  CircularEphemeris ephemeris;
};

/// Force model: point-mass Earth, optional zonal J2..J4, optional third bodies.
struct ForceModel {
  double mu_earth = constants::kMuEarth;
  double earth_radius_km = constants::kEarthRadiusKm;
  std::vector<double> zonal_coefficients;  // {J2}, {J2,J3} or {J2,J3,J4}
  std::vector<ThirdBody> third_bodies;

  static ForceModel two_body() { return ForceModel{}; }
  static ForceModel zonal() {
    ForceModel fm;
    fm.zonal_coefficients = {constants::kJ2, constants::kJ3, constants::kJ4};
    return fm;
  }
  static ForceModel earth_moon(double moon_phase_rad = 0.0, double moon_inclination_rad = 0.0,
                               double moon_raan_rad = 0.0) {
    ForceModel fm = zonal();
    ThirdBody moon;
    moon.ephemeris.initial_phase_rad = moon_phase_rad;
    moon.ephemeris.inclination_rad = moon_inclination_rad;
    moon.ephemeris.raan_rad = moon_raan_rad;
    fm.third_bodies.push_back(moon);
    return fm;
  }
};

/// Position error split into the satellite-local RSW triad.
struct RswError {
  double radial_km = 0.0;
  double along_track_km = 0.0;
  double cross_track_km = 0.0;
  double total_km = 0.0;
};

}  // namespace odlearn::orbit
