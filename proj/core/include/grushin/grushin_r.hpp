#pragma once

#include <utility>
#include <vector>

#include "grushin/dynamics.hpp"
#include "grushin/singular_synthesis.hpp"

// Closed forms for the integrable profile f(r) = r, unit energy throughout.
namespace grushin::linear {

struct OscillationParams {
  double r_min = 0.0, r_max = 0.0;
  double w0 = 0.0, K = 0.0, L = 0.0;
  double phi = 0.0;  // in (-pi/2, pi/2], sign of L
  double r0 = 0.0;
};

OscillationParams params_from_covector(const Point& q0, const Covector& l0);
// r_min, r_max from (K, w0) on the unit shell.
std::pair<double, double> extrema_from_invariants(double K, double w0);
double w0_from_extrema(double r_min, double r_max);  // 1/sqrt(r_min^2 + r_max^2)

class ClosedFormGeodesic {
 public:
  ClosedFormGeodesic(const Point& q0, const Covector& l0);

  const OscillationParams& params() const { return par_; }
  double s(double t) const;  // |w0| t + phi
  double r(double t) const;
  // polar angle, continuous for K != 0; jumps by pi at axis crossings when K = 0
  double theta(double t) const;
  double z(double t) const;
  Point position(double t) const;

 private:
  OscillationParams par_;
  Point q0_;
  double theta0_ = 0.0;
  double sign_k_ = 0.0;
  double rho_sign_ = 1.0;  // K = 0: sign of the signed radius at t = 0+
};

// (x - sin x cos x)/2, the antiderivative of sin^2
double eta(double x);

// Endpoint of the geodesic with covector l0 (any energy) at time t.
// Entire in t * l0, so it also covers w0 = 0 and bases on the axis.
Point exp_r(const Point& q0, const Covector& l0, double t);

// d(r, theta)/d(r_min, r_max) along the geodesic with phase phi. For
// phi in {0, pi/2} the value is rescaled by sin(phi) cos(phi) and for
// r_min = 0 the 1/r(t) factor is dropped, so every chart stays finite.
double jacobian_D(double t, double r_min, double r_max, double phi);
double F_function(double t, double r_min, double r_max, double phi);

// First positive zero of jacobian_D on (0, 1.5 pi/w0]: sign changes of D,
// plus touching zeros located as sign changes of dD/dt where D vanishes.
double first_zero_of_D(double r_min, double r_max, double phi);

double conjugate_time(const Point& q0, const Covector& l0);  // pi/|w0|, +inf for w0 = 0

SynthesisResult cut_time_and_locus(const Point& q0, const Covector& l0);
// {(-x0, -y0, z) : |z - z0| >= pi r0^2 / 2}
bool on_cut_locus(const Point& q0, const Point& q, double tol = 1e-12);

// Exact distance from a point on the axis by inverting the axis geodesics.
DistanceResult distance_from_axis(const Point& axis_point, const Point& target);
DistanceResult distance_r(const Point& q0, const Point& q1);

struct FanRow {
  double w0, phi, t, x, y, z;
};
// Unit geodesics from q0 sharing w0, sampled on [0, pi/|w0|]; they all meet
// at the cut point.
std::vector<FanRow> exp_fan(const Point& q0, double w0, int n_geodesics, int n_times);

}  // namespace grushin::linear
