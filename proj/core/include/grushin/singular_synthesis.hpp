#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "grushin/dynamics.hpp"
#include "grushin/profile.hpp"

namespace grushin {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct TurningPointData {
  double rho_star = 0.0;
  double T = 0.0;
  double w0 = 0.0;
  double E = 0.0;
  double z_T = 0.0;  // signed vertical displacement over one period
  // first-return time from the ODE, NaN unless cross-checked
  double T_ode = std::numeric_limits<double>::quiet_NaN();
};

struct SynthesisResult {
  double t_cut = kInfinity;
  std::optional<Point> cut_point;
  double length = kInfinity;
  std::string meta;
  bool certified = true;
};

// Exact results carry value with lower = value - tol, upper = value + tol;
// bound-only results leave value NaN.
struct DistanceResult {
  double value = std::numeric_limits<double>::quiet_NaN();
  double lower = 0.0;
  double upper = kInfinity;
  std::string witness;
  double tol = 0.0;
  bool exact() const { return value == value; }
};

TurningPointData period(const Profile& p, double E, double w0, bool crosscheck = false);

PlanarTrajectory geodesic_from_sigma(const Profile& p, double z0, double theta0, double E,
                                     double w0, double t_max, const DynamicsOptions& opts = {});

SynthesisResult cut_from_sigma(const Profile& p, double E, double w0, double z0 = 0.0);

// Unit-speed branch data for targets at radius rho_bar: the trajectory with
// parameter w0 reaches rho_bar at t1 (height z1) on the way out and at t2
// (height z2) on the way back. Valid for 0 < w0 <= w_star = 1/f(rho_bar).
struct BranchValues {
  double w_star = 0.0;
  double t1 = 0.0, z1 = 0.0;
  double t2 = 0.0, z2 = 0.0;
};
BranchValues branch_values(const Profile& p, double rho_bar, double w0);

DistanceResult distance_from_sigma(const Profile& p, const Point& q0, const Point& target);

struct BallSample {
  double w0 = 0.0, t = 0.0, rho = 0.0, z = 0.0;
};
// Closed silhouette of the unit-speed ball in a half plane, ordered by w0
// from the bottom of the axis through (radius, z0) to the top. n_samples
// counts the points with w0 >= 0.
std::vector<BallSample> ball_boundary_from_sigma(const Profile& p, const Point& q0,
                                                 double radius, int n_samples);

// |dxy| + min(h(|dz|), |dz|/f(r)), r the radius of q.
double ball_box_formula(const Profile& p, const Point& q, const Point& q2);
DistanceResult ball_box_bounds(const Profile& p, const Point& q, const Point& q2, double c_v);

struct BallBoxCalibration {
  double c_v = 1.0;
  int samples = 0;
  double half_box = 0.0;
};
// Largest ratio max(d/F, F/d) over random pairs with one endpoint on the
// axis, where the exact distance is available.
BallBoxCalibration calibrate_ball_box(const Profile& p, double half_box, int n_pairs,
                                      std::uint64_t seed);

}  // namespace grushin
