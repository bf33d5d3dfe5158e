#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "grushin/ode.hpp"
#include "grushin/profile.hpp"

namespace grushin {

struct Point {
  double x = 0.0, y = 0.0, z = 0.0;
  double r() const { return std::hypot(x, y); }
};

// Initial momentum at a base point; w0 is conserved along the flow.
struct Covector {
  double u0 = 0.0, v0 = 0.0, w0 = 0.0;
};

// 2E = u0^2 + v0^2 + f(r0)^2 w0^2
double twice_energy(const Profile& p, const Point& q0, const Covector& l0);
double angular_momentum(const Point& q0, const Covector& l0);  // K = x v - y u
double radial_momentum(const Point& q0, const Covector& l0);   // L = x u + y v
// K counts as zero below this (relative to r0 |(u0,v0)|).
bool k_is_zero(const Point& q0, const Covector& l0);
// Rescales l0 to 2E = 1; the geodesic is unchanged up to time scaling.
Covector normalize_energy(const Profile& p, const Point& q0, const Covector& l0);
bool is_unit_energy(const Profile& p, const Point& q0, const Covector& l0, double tol = 1e-9);

struct DynamicsOptions {
  OdeOptions ode;
  double drift_tol = 1e-8;
  double switch_radius = 1e-6;
  double r_floor = 1e-10;
  bool check_drift = true;
};

struct DriftReport {
  double max_dH = 0.0;
  double max_dK = 0.0;
};

// State [x, y, z, u, v]; w0 rides along as a parameter.
struct CartesianTrajectory {
  DenseSolution<5> sol;
  double w0 = 0.0;
  double H0 = 0.0;
  double K0 = 0.0;
  // time of the switch to planar form, NaN if it never happened
  double t_handoff = std::numeric_limits<double>::quiet_NaN();
  double theta_plane = 0.0;  // plane angle once in planar form
  std::vector<double> sigma_times;
  DriftReport drift;

  Vec<5> state(double t) const { return sol(t); }
  Point position(double t) const {
    auto s = sol(t);
    return {s[0], s[1], s[2]};
  }
};

// State [rho, rhodot, z] in the vertical plane at angle theta0.
struct PlanarTrajectory {
  DenseSolution<3> sol;
  double w0 = 0.0;
  double E = 0.0;
  double theta0 = 0.0;
  std::vector<double> sigma_times;  // crossings of rho = 0 after t = 0
  DriftReport drift;

  Vec<3> state(double t) const { return sol(t); }
  Point position(double t) const {
    auto s = sol(t);
    return {s[0] * std::cos(theta0), s[0] * std::sin(theta0), s[2]};
  }
};

// State [rho, rhodot, z, rho_w0, rhodot_w0].
struct VariationalTrajectory {
  DenseSolution<5> sol;
  double w0 = 0.0;
  double E = 0.0;
};

// State [r, rdot, theta, z, sweep] with sweep = int |K|/r^2.
struct CylindricalTrajectory {
  DenseSolution<5> sol;
  double w0 = 0.0;
  double K = 0.0;
  double L = 0.0;
  double E = 0.0;
  DriftReport drift;
};

CartesianTrajectory integrate_cartesian(const Profile& p, const Point& q0, const Covector& l0,
                                        double t_max, const DynamicsOptions& opts = {});

PlanarTrajectory integrate_planar(const Profile& p, double rho0, double rhodot0, double z0,
                                  double w0, double E, double t_max,
                                  const DynamicsOptions& opts = {}, double theta0 = 0.0);

VariationalTrajectory integrate_variational(const Profile& p, double rho0, double rhodot0,
                                            double z0, double w0, double E, double t_max,
                                            const DynamicsOptions& opts = {});

// Requires r0 > 0 and K != 0 so that r stays away from the axis. Stops after
// the first step on which the sweep reaches stop_sweep.
CylindricalTrajectory integrate_cylindrical(
    const Profile& p, const Point& q0, const Covector& l0, double t_max,
    const DynamicsOptions& opts = {},
    double stop_sweep = std::numeric_limits<double>::infinity());

// |z_w0(t) - (-1/w0) rhodot(t) rho_w0(t)| along the singular start with z_w0
// from central differences of re-integrated trajectories.
double z_w0_identity_check(const Profile& p, double w0, double E, double t);

}  // namespace grushin
