#include "odlearn/orbit/propagate.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

#include "odlearn/common/error.hpp"

namespace odlearn::orbit {

Eigen::Vector3d CircularEphemeris::position_at(double epoch_s) const {
  const double phase = initial_phase_rad + angular_rate_rad_s * epoch_s;
  const Eigen::Vector3d in_plane(radius_km * std::cos(phase), radius_km * std::sin(phase), 0.0);
  const Eigen::Matrix3d rot = (Eigen::AngleAxisd(raan_rad, Eigen::Vector3d::UnitZ()) *
                               Eigen::AngleAxisd(inclination_rad, Eigen::Vector3d::UnitX()))
                                  .toRotationMatrix();
  return rot * in_plane;
}

Eigen::Vector3d third_body_acceleration(const Eigen::Vector3d& position_km,
                                        const Eigen::Vector3d& body_position_km, double mu_body) {
  const Eigen::Vector3d delta = body_position_km - position_km;
  const double delta_norm = delta.norm();
  if (delta_norm <= 0.0) {
    throw DomainError("third_body_acceleration: spacecraft at perturbing body center");
  }
  const double body_norm = body_position_km.norm();
  Eigen::Vector3d acc = mu_body * delta / (delta_norm * delta_norm * delta_norm);
  if (body_norm > 0.0) {
    acc -= mu_body * body_position_km / (body_norm * body_norm * body_norm);
  }
  return acc;
}

namespace {

// Zonal J2..J4 accelerations (axisymmetric geopotential gradient).
Eigen::Vector3d zonal_acceleration(const Eigen::Vector3d& r, double mu, double re,
                                   const std::vector<double>& j) {
  const double rn = r.norm();
  const double x = r.x(), y = r.y(), z = r.z();
  const double zr = z / rn;
  const double zr2 = zr * zr;
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();

  if (!j.empty() && j[0] != 0.0) {
    const double c = -1.5 * j[0] * mu * re * re / std::pow(rn, 5);
    acc.x() += c * x * (1.0 - 5.0 * zr2);
    acc.y() += c * y * (1.0 - 5.0 * zr2);
    acc.z() += c * z * (3.0 - 5.0 * zr2);
  }
  if (j.size() > 1 && j[1] != 0.0) {
    const double c = -2.5 * j[1] * mu * std::pow(re, 3) / std::pow(rn, 7);
    const double k = 3.0 * z - 7.0 * z * zr2;
    acc.x() += c * x * k;
    acc.y() += c * y * k;
    acc.z() += c * (6.0 * z * z - 7.0 * z * z * zr2 - 0.6 * rn * rn);
  }
  if (j.size() > 2 && j[2] != 0.0) {
    const double c = 1.875 * j[2] * mu * std::pow(re, 4) / std::pow(rn, 7);
    const double k = 1.0 - 14.0 * zr2 + 21.0 * zr2 * zr2;
    acc.x() += c * x * k;
    acc.y() += c * y * k;
    acc.z() += c * z * (5.0 - 70.0 * zr2 / 3.0 + 21.0 * zr2 * zr2);
  }
  return acc;
}

using State6 = Eigen::Matrix<double, 6, 1>;

State6 derivative(const State6& s, double epoch_s, const ForceModel& fm) {
  State6 ds;
  ds.head<3>() = s.tail<3>();
  ds.tail<3>() = acceleration(s.head<3>(), epoch_s, fm);
  return ds;
}

// Dormand-Prince 5(4) coefficients.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
// 5th order solution weights equal the last A row (FSAL).
constexpr double kB5[7] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kB4[7] = {5179.0 / 57600,    0.0,           7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

}  // namespace

Eigen::Vector3d acceleration(const Eigen::Vector3d& position_km, double epoch_s,
                             const ForceModel& fm) {
  const double rn = position_km.norm();
  if (rn <= 0.0) throw DomainError("acceleration: zero position");
  Eigen::Vector3d acc = -fm.mu_earth * position_km / (rn * rn * rn);
  if (!fm.zonal_coefficients.empty()) {
    acc += zonal_acceleration(position_km, fm.mu_earth, fm.earth_radius_km,
                              fm.zonal_coefficients);
  }
  for (const auto& body : fm.third_bodies) {
    acc += third_body_acceleration(position_km, body.ephemeris.position_at(epoch_s), body.mu);
  }
  return acc;
}

std::vector<CartesianState> propagate(const CartesianState& state, const ForceModel& fm,
                                      std::span<const double> target_epochs_s,
                                      const IntegratorOptions& opt) {
  for (std::size_t i = 0; i < target_epochs_s.size(); ++i) {
    if (target_epochs_s[i] < state.epoch_s) {
      throw PreconditionError("propagate: target epoch precedes state epoch");
    }
    if (i > 0 && target_epochs_s[i] < target_epochs_s[i - 1]) {
      throw PreconditionError("propagate: target epochs must be sorted");
    }
  }

  std::vector<CartesianState> out;
  out.reserve(target_epochs_s.size());

  State6 y = state.as_vector();
  double t = state.epoch_s;
  double h = opt.max_step_s;
  State6 k[7];
  bool have_first_stage = false;

  for (double target : target_epochs_s) {
    if (target == t) {
      out.push_back(CartesianState::from_vector(y, t));
      continue;
    }
    while (t < target) {
      const double remaining = target - t;
      if (remaining <= 1e-9) {  // below integration resolution; snap
        t = target;
        break;
      }
      h = std::min({h, opt.max_step_s, remaining});
      if (!have_first_stage) {
        k[0] = derivative(y, t, fm);
        have_first_stage = true;
      }
      for (;;) {
        for (int s = 1; s < 7; ++s) {
          State6 ys = y;
          for (int q = 0; q < s; ++q) ys += h * kA[s][q] * k[q];
          k[s] = derivative(ys, t + kC[s] * h, fm);
        }
        State6 y5 = y, err = State6::Zero();
        for (int s = 0; s < 7; ++s) {
          y5 += h * kB5[s] * k[s];
          err += h * (kB5[s] - kB4[s]) * k[s];
        }
        double err_norm = 0.0;
        for (int i = 0; i < 6; ++i) {
          const double scale =
              opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
          const double e = err[i] / scale;
          err_norm += e * e;
        }
        err_norm = std::sqrt(err_norm / 6.0);

        if (err_norm <= 1.0) {
          t += h;
          y = y5;
          k[0] = k[6];  // FSAL
          const double grow = err_norm == 0.0 ? 5.0 : 0.9 * std::pow(err_norm, -0.2);
          h *= std::clamp(grow, 0.2, 5.0);
          break;
        }
        h *= std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 0.9);
        if (h < opt.min_step_s) {
          throw IntegrationError("propagate: step size underflow", t);
        }
      }
    }
    out.push_back(CartesianState::from_vector(y, t));
  }
  return out;
}

CartesianState propagate_to(const CartesianState& state, const ForceModel& fm,
                            double target_epoch_s, const IntegratorOptions& opt) {
  const double targets[1] = {target_epoch_s};
  return propagate(state, fm, targets, opt)[0];
}

}  // namespace odlearn::orbit
