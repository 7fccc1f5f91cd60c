#include "odlearn/obs/observation.hpp"

#include <cmath>

#include "odlearn/common/error.hpp"
#include "odlearn/orbit/kepler.hpp"

namespace odlearn::obs {

using orbit::CartesianState;

CartesianState station_eci_state(const GroundStation& station, double epoch_s,
                                 const EarthRotationModel& earth) {
  const double r = orbit::constants::kEarthRadiusKm + station.altitude_km;
  const double lst = earth.reference_angle_rad + station.longitude_rad +
                     earth.rotation_rate_rad_s * epoch_s;  // local sidereal angle
  const double cos_lat = std::cos(station.latitude_rad);

  CartesianState s;
  s.position_km = {r * cos_lat * std::cos(lst), r * cos_lat * std::sin(lst),
                   r * std::sin(station.latitude_rad)};
  s.velocity_km_s =
      Eigen::Vector3d(0.0, 0.0, earth.rotation_rate_rad_s).cross(s.position_km);
  s.epoch_s = epoch_s;
  return s;
}

TopocentricObservation topocentric(const CartesianState& spacecraft,
                                   const GroundStation& station,
                                   const EarthRotationModel& earth) {
  const CartesianState site = station_eci_state(station, spacecraft.epoch_s, earth);
  const Eigen::Vector3d rho = spacecraft.position_km - site.position_km;
  const double range = rho.norm();
  if (range <= 1e-12) {
    throw DomainError("topocentric: spacecraft coincides with station");
  }
  const Eigen::Vector3d rho_dot = spacecraft.velocity_km_s - site.velocity_km_s;

  // Local up / east / north from the spherical site position.
  const Eigen::Vector3d up = site.position_km.normalized();
  Eigen::Vector3d east = Eigen::Vector3d::UnitZ().cross(up);
  const double east_norm = east.norm();
  if (east_norm < 1e-12) {
    east = Eigen::Vector3d::UnitY();  // polar station: pick a convention
  } else {
    east /= east_norm;
  }
  const Eigen::Vector3d north = up.cross(east);

  const double rho_up = rho.dot(up);
  const double rho_east = rho.dot(east);
  const double rho_north = rho.dot(north);

  TopocentricObservation out;
  out.elevation_rad = std::asin(std::clamp(rho_up / range, -1.0, 1.0));
  out.azimuth_rad = orbit::normalize_angle(std::atan2(rho_east, rho_north));
  out.range_km = range;
  out.range_rate_km_s = rho.dot(rho_dot) / range;
  out.station_id = station.id;
  out.epoch_s = spacecraft.epoch_s;
  return out;
}

double doppler_shift(double range_rate_km_s, double carrier_frequency_hz) {
  if (std::abs(range_rate_km_s) >= orbit::constants::kSpeedOfLightKmS) {
    throw PreconditionError("doppler_shift: |range rate| must be below c");
  }
  return -carrier_frequency_hz * range_rate_km_s / orbit::constants::kSpeedOfLightKmS;
}

std::vector<bool> visible(const CartesianState& spacecraft,
                          const std::vector<GroundStation>& stations,
                          const EarthRotationModel& earth) {
  std::vector<bool> out(stations.size());
  for (std::size_t i = 0; i < stations.size(); ++i) {
    const TopocentricObservation o = topocentric(spacecraft, stations[i], earth);
    out[i] = o.elevation_rad >= stations[i].min_elevation_rad;
  }
  return out;
}

}  // namespace odlearn::obs
