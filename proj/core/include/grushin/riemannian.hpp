#pragma once

#include <string_view>
#include <vector>

#include "grushin/dynamics.hpp"
#include "grushin/profile.hpp"
#include "grushin/singular_synthesis.hpp"

namespace grushin {

// Reflection of (u0, v0) across the line through the origin and (x0, y0):
// flips K, keeps L, E and w0.
Covector symmetrize_covector(const Point& q0, const Covector& l0);

// First time the angular sweep int |K|/r^2 reaches pi, +inf if not before
// t_max. Needs K != 0 and a unit-energy covector.
double conjectured_cut_time(const Profile& p, const Point& q0, const Covector& l0, double t_max,
                            const DynamicsOptions& opts = {});

struct SigmaHit {
  double t = kInfinity;
  double rhodot = 0.0;  // signed radial speed at the hit
};
// First crossing of the axis for K = 0 geodesics from q0 off the axis.
SigmaHit sigma_hitting_time(const Profile& p, const Point& q0, const Covector& l0,
                            const DynamicsOptions& opts = {});

// Two-parameter charts of the unit energy shell at a fixed base point:
// KW uses (K, w0), LW uses (L, w0), KL uses (K, L).
enum class Chart { KW, LW, KL };
Chart parse_chart(std::string_view name);
const char* chart_name(Chart c);

struct ChartCoords {
  double c1 = 0.0, c2 = 0.0;
};
ChartCoords chart_coordinates(Chart chart, const Point& q0, const Covector& l0);
// Inverse of chart_coordinates; the discarded sign comes from ref.
Covector covector_from_chart(const Profile& p, Chart chart, const Point& q0, const Covector& ref,
                             ChartCoords c);

// (1/w0)(r_c1 theta_c2 - r_c2 theta_c1) at time t with partials by central
// differences in the chart coordinates.
double jacobian_reduced(const Profile& p, Chart chart, const Point& q0, const Covector& l0,
                        double t);
// Determinant of d(r, theta, z)/d(t, c1, c2) by finite differences.
double full_determinant(const Profile& p, Chart chart, const Point& q0, const Covector& l0,
                        double t);

// Straight lines (w0 = 0, v0 != 0): determinant of d(x, y, z)/d(t, u0, w0),
// by finite differences and by the closed form -(t/v0) int_0^t f^2 ds.
double straight_line_determinant_fd(const Profile& p, const Point& q0, const Covector& l0,
                                    double t);
double straight_line_determinant(const Profile& p, const Point& q0, const Covector& l0, double t);

struct SignChange {
  double t_lo = 0.0, t_hi = 0.0;
};
// Sign changes of the reduced determinant on (0, t_max], sampled on a
// uniform grid and narrowed by bisection. Exploratory, never certified.
std::vector<SignChange> experimental_conjugate_search(const Profile& p, const Point& q0,
                                                      const Covector& l0, double t_max,
                                                      int grid = 200);

}  // namespace grushin
