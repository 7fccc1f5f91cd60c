#include "odlearn/orbit/kepler.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

#include "odlearn/common/error.hpp"

namespace odlearn::orbit {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
constexpr double kKeplerTol = 1e-12;
constexpr double kSingularEcc = 1e-8;
constexpr double kSingularInc = 1e-8;
}  // namespace

double normalize_angle(double angle_rad) {
  double a = std::fmod(angle_rad, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}

double angle_difference(double a_rad, double b_rad) {
  double d = std::fmod(a_rad - b_rad, kTwoPi);
  if (d > M_PI) d -= kTwoPi;
  if (d <= -M_PI) d += kTwoPi;
  return d;
}

double kepler_solve(double mean_anomaly_rad, double eccentricity) {
  if (eccentricity < 0.0 || eccentricity >= 1.0) {
    throw PreconditionError("kepler_solve: eccentricity must lie in [0, 1)");
  }
  const double m = normalize_angle(mean_anomaly_rad);
  auto residual = [&](double e_anom) { return e_anom - eccentricity * std::sin(e_anom) - m; };

  // Newton from a standard starting guess.
  double e_anom = (eccentricity < 0.8) ? m : M_PI;
  bool converged = false;
  for (int it = 0; it < 50; ++it) {
    const double f = residual(e_anom);
    if (std::abs(f) < kKeplerTol) {
      converged = true;
      break;
    }
    const double fp = 1.0 - eccentricity * std::cos(e_anom);
    e_anom -= f / fp;
  }

  if (!converged) {
    // Bisection fallback on [0, 2*pi]; f is monotone increasing in E.
    double lo = 0.0, hi = kTwoPi;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      (residual(mid) < 0.0 ? lo : hi) = mid;
    }
    e_anom = 0.5 * (lo + hi);
    if (std::abs(residual(e_anom)) > kKeplerTol * 10.0) {
      throw ConvergenceError("kepler_solve failed to converge", std::abs(residual(e_anom)));
    }
  }
  return normalize_angle(e_anom);
}

double eccentric_to_true_anomaly(double eccentric_anomaly_rad, double eccentricity) {
  const double half = 0.5 * eccentric_anomaly_rad;
  return normalize_angle(2.0 * std::atan2(std::sqrt(1.0 + eccentricity) * std::sin(half),
                                          std::sqrt(1.0 - eccentricity) * std::cos(half)));
}

double true_to_eccentric_anomaly(double true_anomaly_rad, double eccentricity) {
  const double half = 0.5 * true_anomaly_rad;
  return normalize_angle(2.0 * std::atan2(std::sqrt(1.0 - eccentricity) * std::sin(half),
                                          std::sqrt(1.0 + eccentricity) * std::cos(half)));
}

double orbital_period(double semi_major_axis_km, double mu) {
  return kTwoPi * std::sqrt(std::pow(semi_major_axis_km, 3) / mu);
}

CartesianState elements_to_state(const KeplerianElements& el, double mu) {
  const double a = el.semi_major_axis_km;
  const double e = el.eccentricity;
  const double e_anom = kepler_solve(el.mean_anomaly_rad, e);

  const double cos_e = std::cos(e_anom);
  const double sin_e = std::sin(e_anom);
  const double fac = std::sqrt(1.0 - e * e);
  const double r = a * (1.0 - e * cos_e);
  const double v_scale = std::sqrt(mu * a) / r;

  // Perifocal frame: x toward perigee, z along angular momentum.
  const Eigen::Vector3d r_pf(a * (cos_e - e), a * fac * sin_e, 0.0);
  const Eigen::Vector3d v_pf(-v_scale * sin_e, v_scale * fac * cos_e, 0.0);

  const Eigen::Matrix3d rot =
      (Eigen::AngleAxisd(el.raan_rad, Eigen::Vector3d::UnitZ()) *
       Eigen::AngleAxisd(el.inclination_rad, Eigen::Vector3d::UnitX()) *
       Eigen::AngleAxisd(el.arg_perigee_rad, Eigen::Vector3d::UnitZ()))
          .toRotationMatrix();

  return CartesianState{rot * r_pf, rot * v_pf, el.epoch_s};
}

KeplerianElements state_to_elements(const CartesianState& state, double mu) {
  const Eigen::Vector3d r = state.position_km;
  const Eigen::Vector3d v = state.velocity_km_s;
  const double r_norm = r.norm();
  if (r_norm <= 0.0) throw PreconditionError("state_to_elements: zero position");

  const double energy = 0.5 * v.squaredNorm() - mu / r_norm;
  if (energy >= 0.0) {
    throw DomainError("state_to_elements: state is not a bound elliptic orbit");
  }

  const Eigen::Vector3d h = r.cross(v);
  const double h_norm = h.norm();
  if (h_norm <= 0.0) throw DomainError("state_to_elements: degenerate (radial) trajectory");

  const Eigen::Vector3d e_vec = ((v.squaredNorm() - mu / r_norm) * r - r.dot(v) * v) / mu;
  const double ecc = e_vec.norm();
  const double a = -mu / (2.0 * energy);
  const double inc = std::acos(std::clamp(h.z() / h_norm, -1.0, 1.0));

  const Eigen::Vector3d node = Eigen::Vector3d::UnitZ().cross(h);
  const double node_norm = node.norm();

  KeplerianElements el;
  el.semi_major_axis_km = a;
  el.eccentricity = ecc;
  el.inclination_rad = inc;
  el.epoch_s = state.epoch_s;

  const bool circular = ecc < kSingularEcc;
  const bool equatorial = inc < kSingularInc || node_norm <= 0.0;

  if (equatorial) {
    el.raan_rad = 0.0;
  } else {
    el.raan_rad = normalize_angle(std::atan2(node.y(), node.x()));
  }

  double true_anom;
  if (circular) {
    el.arg_perigee_rad = 0.0;
    // Anomaly measured from the node line (or X axis when equatorial).
    const Eigen::Vector3d ref =
        equatorial ? Eigen::Vector3d::UnitX() : Eigen::Vector3d(node / node_norm);
    double u = std::acos(std::clamp(ref.dot(r) / r_norm, -1.0, 1.0));
    if (r.dot(h.cross(ref)) < 0.0) u = kTwoPi - u;
    true_anom = u;  // circular: nu == E == u
  } else {
    double omega;
    if (equatorial) {
      omega = std::atan2(e_vec.y(), e_vec.x());
    } else {
      const Eigen::Vector3d n_hat = node / node_norm;
      omega = std::acos(std::clamp(n_hat.dot(e_vec) / ecc, -1.0, 1.0));
      if (e_vec.z() < 0.0) omega = kTwoPi - omega;
    }
    el.arg_perigee_rad = normalize_angle(omega);

    double nu = std::acos(std::clamp(e_vec.dot(r) / (ecc * r_norm), -1.0, 1.0));
    if (r.dot(v) < 0.0) nu = kTwoPi - nu;
    true_anom = nu;
  }

  const double e_anom = true_to_eccentric_anomaly(true_anom, ecc);
  el.mean_anomaly_rad = normalize_angle(e_anom - ecc * std::sin(e_anom));
  return el;
}

}  // namespace odlearn::orbit
