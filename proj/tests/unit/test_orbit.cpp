#include <cmath>

#include "doctest.h"
#include "odlearn/common/error.hpp"
#include "odlearn/common/rng.hpp"
#include "odlearn/orbit/kepler.hpp"
#include "odlearn/orbit/propagate.hpp"
#include "odlearn/orbit/rsw.hpp"

using namespace odlearn;
using namespace odlearn::orbit;

namespace {

// Independent bisection oracle for Kepler's equation on [0, 2*pi].
double kepler_bisection_oracle(double m, double e) {
  auto f = [&](double x) { return x - e * std::sin(x) - m; };
  double lo = 0.0, hi = 2.0 * M_PI;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double specific_energy(const CartesianState& s, double mu) {
  return 0.5 * s.velocity_km_s.squaredNorm() - mu / s.position_km.norm();
}

}  // namespace

TEST_CASE("kepler_solve fixed points and oracle") {
  CHECK(kepler_solve(0.0, 0.5) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(kepler_solve(M_PI, 0.9) == doctest::Approx(M_PI).epsilon(1e-14));

  const double oracle = kepler_bisection_oracle(1.0, 0.1);
  CHECK(std::abs(kepler_solve(1.0, 0.1) - oracle) < 1e-12);

  CHECK_THROWS_AS(kepler_solve(1.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(kepler_solve(1.0, -0.1), PreconditionError);
}

TEST_CASE("kepler_solve residual below 1e-12 on 1e4 random cases") {
  RngStream rng(42, 0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double m = rng.uniform(0.0, 2.0 * M_PI);
    const double e = rng.uniform(0.0, 0.95);
    const double ea = kepler_solve(m, e);
    const double normalized_m = normalize_angle(m);
    const double residual = std::abs(angle_difference(ea - e * std::sin(ea), normalized_m));
    worst = std::max(worst, residual);
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("elements_to_state circular equatorial oracle") {
  KeplerianElements el;
  el.semi_major_axis_km = 7000.0;
  const CartesianState s = elements_to_state(el);
  CHECK(s.position_km.x() == doctest::Approx(7000.0).epsilon(1e-12));
  CHECK(std::abs(s.position_km.y()) < 1e-9);
  CHECK(std::abs(s.position_km.z()) < 1e-9);
  const double v_circ = std::sqrt(constants::kMuEarth / 7000.0);
  CHECK(s.velocity_km_s.norm() == doctest::Approx(v_circ).epsilon(1e-12));
}

TEST_CASE("elements_to_state satisfies vis-viva and perigee geometry") {
  RngStream rng(7, 0);
  for (int i = 0; i < 200; ++i) {
    KeplerianElements el;
    el.semi_major_axis_km = rng.uniform(6800.0, 45000.0);
    el.eccentricity = rng.uniform(0.0, 0.8);
    el.inclination_rad = rng.uniform(0.0, M_PI - 0.01);
    el.raan_rad = rng.uniform(0.0, 2.0 * M_PI);
    el.arg_perigee_rad = rng.uniform(0.0, 2.0 * M_PI);
    el.mean_anomaly_rad = rng.uniform(0.0, 2.0 * M_PI);
    const CartesianState s = elements_to_state(el);
    const double r = s.position_km.norm();
    const double v2 = s.velocity_km_s.squaredNorm();
    const double vis_viva = constants::kMuEarth * (2.0 / r - 1.0 / el.semi_major_axis_km);
    CHECK(v2 == doctest::Approx(vis_viva).epsilon(1e-9));
  }

  KeplerianElements perigee;
  perigee.semi_major_axis_km = 10000.0;
  perigee.eccentricity = 0.5;
  perigee.mean_anomaly_rad = 0.0;
  const CartesianState s = elements_to_state(perigee);
  CHECK(s.position_km.norm() == doctest::Approx(10000.0 * 0.5).epsilon(1e-12));
}

TEST_CASE("element/state round trip to 1e-9 away from singularities") {
  RngStream rng(11, 0);
  for (int i = 0; i < 300; ++i) {
    KeplerianElements el;
    el.semi_major_axis_km = rng.uniform(6800.0, 30000.0);
    el.eccentricity = rng.uniform(1e-4, 0.85);
    el.inclination_rad = rng.uniform(1e-3, M_PI - 1e-3);
    el.raan_rad = rng.uniform(0.0, 2.0 * M_PI);
    el.arg_perigee_rad = rng.uniform(0.0, 2.0 * M_PI);
    el.mean_anomaly_rad = rng.uniform(0.0, 2.0 * M_PI);

    const KeplerianElements back = state_to_elements(elements_to_state(el));
    CHECK(back.semi_major_axis_km ==
          doctest::Approx(el.semi_major_axis_km).epsilon(1e-9));
    CHECK(std::abs(back.eccentricity - el.eccentricity) < 1e-9);
    CHECK(std::abs(back.inclination_rad - el.inclination_rad) < 1e-9);
    CHECK(std::abs(angle_difference(back.raan_rad, el.raan_rad)) < 1e-9);
    CHECK(std::abs(angle_difference(back.arg_perigee_rad, el.arg_perigee_rad)) < 1e-8);
    CHECK(std::abs(angle_difference(back.mean_anomaly_rad, el.mean_anomaly_rad)) < 1e-8);
  }
}

TEST_CASE("state_to_elements rejects unbound states and canonicalizes singular ones") {
  CartesianState hyperbolic;
  hyperbolic.position_km = {7000.0, 0.0, 0.0};
  hyperbolic.velocity_km_s = {0.0, 12.0, 0.0};  // above escape speed
  CHECK_THROWS_AS(state_to_elements(hyperbolic), DomainError);

  KeplerianElements circ;
  circ.semi_major_axis_km = 7200.0;
  circ.inclination_rad = 0.9;
  circ.mean_anomaly_rad = 1.3;
  const KeplerianElements back = state_to_elements(elements_to_state(circ));
  CHECK(back.eccentricity < 1e-9);
  CHECK(back.arg_perigee_rad == 0.0);
}

TEST_CASE("state_to_elements anomaly quadrant follows radial velocity sign") {
  KeplerianElements el;
  el.semi_major_axis_km = 7500.0;
  el.eccentricity = 0.1;
  el.inclination_rad = 0.6;

  el.mean_anomaly_rad = 1.0;  // ascending half: r dot v > 0
  CartesianState s = elements_to_state(el);
  CHECK(s.position_km.dot(s.velocity_km_s) > 0.0);
  CHECK(state_to_elements(s).mean_anomaly_rad < M_PI);

  el.mean_anomaly_rad = 2.0 * M_PI - 1.0;  // descending half
  s = elements_to_state(el);
  CHECK(s.position_km.dot(s.velocity_km_s) < 0.0);
  CHECK(state_to_elements(s).mean_anomaly_rad > M_PI);
}

TEST_CASE("two-body propagation conserves energy and angular momentum over 10 periods") {
  KeplerianElements el;
  el.semi_major_axis_km = 7100.0;
  el.eccentricity = 0.05;
  el.inclination_rad = 0.7;
  const CartesianState s0 = elements_to_state(el);

  const double period = orbital_period(el.semi_major_axis_km);
  std::vector<double> targets;
  for (int i = 1; i <= 20; ++i) targets.push_back(0.5 * i * period);

  const ForceModel fm = ForceModel::two_body();
  const auto states = propagate(s0, fm, targets);

  const double e0 = specific_energy(s0, fm.mu_earth);
  const Eigen::Vector3d h0 = s0.position_km.cross(s0.velocity_km_s);
  for (const auto& s : states) {
    CHECK(std::abs(specific_energy(s, fm.mu_earth) - e0) / std::abs(e0) < 1e-8);
    const Eigen::Vector3d h = s.position_km.cross(s.velocity_km_s);
    CHECK((h - h0).norm() / h0.norm() < 1e-8);
  }
}

TEST_CASE("propagation restart consistency and zero-duration identity") {
  KeplerianElements el;
  el.semi_major_axis_km = 6900.0;
  el.eccentricity = 0.02;
  el.inclination_rad = 1.1;
  const CartesianState s0 = elements_to_state(el);
  const ForceModel fm = ForceModel::zonal();

  const auto zero = propagate_to(s0, fm, 0.0);
  CHECK((zero.position_km - s0.position_km).norm() == 0.0);

  const std::vector<double> both = {1500.0, 4200.0};
  const auto one_call = propagate(s0, fm, both);
  const auto first = propagate_to(s0, fm, 1500.0);
  const auto second = propagate_to(first, fm, 4200.0);
  CHECK((second.position_km - one_call[1].position_km).norm() < 1e-6);
  CHECK((second.velocity_km_s - one_call[1].velocity_km_s).norm() < 1e-9);
}

TEST_CASE("propagate rejects unsorted or past target epochs") {
  const CartesianState s0{{7000.0, 0.0, 0.0}, {0.0, 7.5, 0.0}, 100.0};
  const ForceModel fm = ForceModel::two_body();
  const std::vector<double> past = {50.0};
  CHECK_THROWS_AS(propagate(s0, fm, past), PreconditionError);
  const std::vector<double> unsorted = {400.0, 300.0};
  CHECK_THROWS_AS(propagate(s0, fm, unsorted), PreconditionError);
}

TEST_CASE("J2 RAAN drift matches the secular-rate oracle within 5 percent") {
  KeplerianElements el;
  el.semi_major_axis_km = 7000.0;
  el.eccentricity = 0.01;
  el.inclination_rad = 51.6 * M_PI / 180.0;
  const CartesianState s0 = elements_to_state(el);

  ForceModel fm;
  fm.zonal_coefficients = {constants::kJ2};  // J2 only

  const double period = orbital_period(el.semi_major_axis_km);
  const double span = 10.0 * period;
  const auto end = propagate_to(s0, fm, span);
  const KeplerianElements el_end = state_to_elements(end);

  const double drift = angle_difference(el_end.raan_rad, el.raan_rad) / span;
  const double n = std::sqrt(constants::kMuEarth / std::pow(el.semi_major_axis_km, 3));
  const double p = el.semi_major_axis_km * (1.0 - el.eccentricity * el.eccentricity);
  const double oracle = -1.5 * constants::kJ2 * n *
                        std::pow(constants::kEarthRadiusKm / p, 2) *
                        std::cos(el.inclination_rad);
  CHECK(drift < 0.0);  // prograde orbit regresses
  CHECK(std::abs(drift - oracle) / std::abs(oracle) < 0.05);
}

TEST_CASE("zonal acceleration equals the numerical geopotential gradient") {
  // Oracle: a = -grad(Phi), Phi = -mu/r * (1 - sum J_n (Re/r)^n P_n(z/r)).
  const ForceModel fm = ForceModel::zonal();
  auto potential = [&](const Eigen::Vector3d& r) {
    const double rn = r.norm();
    const double sz = r.z() / rn;
    const double p2 = 0.5 * (3.0 * sz * sz - 1.0);
    const double p3 = 0.5 * (5.0 * sz * sz * sz - 3.0 * sz);
    const double p4 = 0.125 * (35.0 * std::pow(sz, 4) - 30.0 * sz * sz + 3.0);
    const double re_r = fm.earth_radius_km / rn;
    return -fm.mu_earth / rn *
           (1.0 - fm.zonal_coefficients[0] * std::pow(re_r, 2) * p2 -
            fm.zonal_coefficients[1] * std::pow(re_r, 3) * p3 -
            fm.zonal_coefficients[2] * std::pow(re_r, 4) * p4);
  };

  RngStream rng(3, 0);
  for (int i = 0; i < 20; ++i) {
    Eigen::Vector3d r(rng.uniform(-9000.0, 9000.0), rng.uniform(-9000.0, 9000.0),
                      rng.uniform(-9000.0, 9000.0));
    if (r.norm() < 6500.0) r *= 6500.0 / r.norm() * 1.5;
    const Eigen::Vector3d acc = acceleration(r, 0.0, fm);
    const double step = 1e-3;
    Eigen::Vector3d grad;
    for (int k = 0; k < 3; ++k) {
      Eigen::Vector3d hi = r, lo = r;
      hi[k] += step;
      lo[k] -= step;
      grad[k] = (potential(hi) - potential(lo)) / (2.0 * step);
    }
    CHECK((acc + grad).norm() / acc.norm() < 1e-7);
  }
}

TEST_CASE("third-body acceleration sign, cancellation and magnitude oracle") {
  const Eigen::Vector3d moon(constants::kMoonDistanceKm, 0.0, 0.0);

  // At Earth's center the direct and indirect terms cancel exactly.
  CHECK(third_body_acceleration(Eigen::Vector3d::Zero(), moon, constants::kMuMoon).norm() ==
        0.0);

  // Between the bodies the net differential pull points toward the Moon.
  const Eigen::Vector3d between(42164.0, 0.0, 0.0);
  CHECK(third_body_acceleration(between, moon, constants::kMuMoon).x() > 0.0);

  // Brute-force two-term evaluation at GEO radius.
  const Eigen::Vector3d sc(0.0, 42164.0, 0.0);
  const Eigen::Vector3d d = moon - sc;
  const Eigen::Vector3d expected =
      constants::kMuMoon * (d / std::pow(d.norm(), 3) - moon / std::pow(moon.norm(), 3));
  CHECK((third_body_acceleration(sc, moon, constants::kMuMoon) - expected).norm() < 1e-18);

  CHECK_THROWS_AS(third_body_acceleration(moon, moon, constants::kMuMoon), DomainError);
}

TEST_CASE("moon ephemeris traces the configured circle") {
  CircularEphemeris moon;
  CHECK(moon.position_at(0.0).x() == doctest::Approx(constants::kMoonDistanceKm));
  CHECK(moon.position_at(constants::kMoonPeriodS / 4.0).y() ==
        doctest::Approx(constants::kMoonDistanceKm).epsilon(1e-9));
  for (double t : {0.0, 1e5, 5e5}) {
    CHECK(moon.position_at(t).norm() ==
          doctest::Approx(constants::kMoonDistanceKm).epsilon(1e-12));
  }
}

TEST_CASE("rsw decomposition basics and norm preservation") {
  KeplerianElements el;
  el.semi_major_axis_km = 7000.0;
  el.eccentricity = 0.01;
  el.inclination_rad = 0.5;
  const CartesianState ref = elements_to_state(el);

  const Eigen::Vector3d r_hat = ref.position_km.normalized();
  const RswError radial = rsw_decompose(ref, ref.position_km + r_hat);
  CHECK(radial.radial_km == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(radial.along_track_km) < 1e-12);
  CHECK(std::abs(radial.cross_track_km) < 1e-12);
  CHECK(radial.total_km == doctest::Approx(1.0).epsilon(1e-12));

  const RswError zero = rsw_decompose(ref, ref.position_km);
  CHECK(zero.total_km == 0.0);

  RngStream rng(5, 0);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d err(rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0),
                              rng.uniform(-50.0, 50.0));
    const RswError d = rsw_decompose(ref, ref.position_km + err);
    const double recombined = std::sqrt(d.radial_km * d.radial_km +
                                        d.along_track_km * d.along_track_km +
                                        d.cross_track_km * d.cross_track_km);
    CHECK(recombined == doctest::Approx(err.norm()).epsilon(1e-12));
    CHECK(d.total_km == doctest::Approx(err.norm()).epsilon(1e-12));
  }

  CartesianState degenerate;
  degenerate.position_km = {7000.0, 0.0, 0.0};
  degenerate.velocity_km_s = {3.0, 0.0, 0.0};
  CHECK_THROWS_AS(rsw_decompose(degenerate, Eigen::Vector3d(1.0, 0.0, 0.0)), DomainError);
}
