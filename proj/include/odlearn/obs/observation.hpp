#pragma once

#include <string>
#include <vector>

#include "odlearn/orbit/types.hpp"

namespace odlearn::obs {

/// Ground station on a rotating spherical Earth.
struct GroundStation {
  std::string id;
  double latitude_rad = 0.0;   // geocentric, [-pi/2, pi/2]
  double longitude_rad = 0.0;  // east positive
  double altitude_km = 0.0;
  double min_elevation_rad = 0.0;  // visibility mask
};

/// Uniform Earth rotation about +Z.
struct EarthRotationModel {
  double rotation_rate_rad_s = orbit::constants::kEarthRotationRateRadS;
  double reference_angle_rad = 0.0;  // Greenwich angle at epoch 0
};

struct TopocentricObservation {
  double azimuth_rad = 0.0;    // from north, clockwise (east = pi/2)
  double elevation_rad = 0.0;  // [-pi/2, pi/2]
  double range_km = 0.0;
  double range_rate_km_s = 0.0;
  std::string station_id;
  double epoch_s = 0.0;
};

/// Station position/velocity in ECI at the given epoch.
orbit::CartesianState station_eci_state(const GroundStation& station, double epoch_s,
                                        const EarthRotationModel& earth);

/// Azimuth/elevation/range/range-rate of the spacecraft as seen from the
/// station. Throws DomainError when the spacecraft coincides with the station.
TopocentricObservation topocentric(const orbit::CartesianState& spacecraft,
                                   const GroundStation& station,
                                   const EarthRotationModel& earth);

/// Doppler shift of a carrier for the given range rate (negative when
/// receding). Throws PreconditionError if |range_rate| >= c.
double doppler_shift(double range_rate_km_s, double carrier_frequency_hz);

/// Per-station visibility: elevation >= min_elevation (closed boundary).
std::vector<bool> visible(const orbit::CartesianState& spacecraft,
                          const std::vector<GroundStation>& stations,
                          const EarthRotationModel& earth);

}  // namespace odlearn::obs
