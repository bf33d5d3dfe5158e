#include "grushin/singular_synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "grushin/errors.hpp"
#include "numerics.hpp"

namespace grushin {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

void require_admissible(const Profile& p) {
  if (!p.admissible())
    throw InputError("profile " + p.name() + " is outside the admissible family");
}

// With r(phi) = f^-1(Y sin phi) the radial integrals lose their inverse
// square root at the turning point:
//   I(u) = int_0^u dphi / f'(r(phi)),  J(u) = int_0^u sin^2 phi / f'(r(phi)) dphi.
// For a trajectory with Y = sqrt(2E)/|w0| the time to reach r(u) is I(u)/|w0|
// and the height gained is sign(w0) Y^2 J(u).
struct Radial {
  const Profile& p;
  double Y;

  double inv_df(double phi) const {
    double d = p.df(p.f_inverse(Y * std::sin(phi)));
    return d > 0.0 ? 1.0 / d : 0.0;
  }
  double I(double u) const {
    return detail::tanh_sinh([this](double phi) { return inv_df(phi); }, 0.0, u);
  }
  double J(double u) const {
    return detail::tanh_sinh(
        [this](double phi) {
          double s = std::sin(phi);
          return s * s * inv_df(phi);
        },
        0.0, u);
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Unit-speed period and height gain for w0 > 0.
double unit_period(const Profile& p, double w) { return 2.0 * Radial{p, 1.0 / w}.I(kHalfPi) / w; }
double unit_zT(const Profile& p, double w) {
  return 2.0 * Radial{p, 1.0 / w}.J(kHalfPi) / (w * w);
}

// w > 0 with g(w) = target for a strictly monotone g, searching in log w
// from w = start by doubling or halving (at most 60 times).
template <class G>
double solve_in_w(G&& g, double target, double start, bool increasing, const char* what) {
  auto h = [&](double s) { return g(std::exp(s)) - target; };
  double s = std::log(start);
  double v = h(s);
  if (v == 0.0) return start;
  // moving right raises g when increasing
  const double step = ((v < 0.0) == increasing) ? std::log(2.0) : -std::log(2.0);
  double s2 = s, v2 = v;
  for (int k = 0;; ++k) {
    if (k == 60)
      throw NumericalError(std::string(what) + ": bracket expansion failed",
                           {{"target", target}, {"w_last", std::exp(s2)}, {"value", v2 + target}});
    s = s2;
    v = v2;
    s2 = s + step;
    v2 = h(s2);
    if ((v2 < 0.0) != (v < 0.0) || v2 == 0.0) break;
  }
  double a = std::min(s, s2), b = std::max(s, s2);
  double fa = s < s2 ? v : v2, fb = s < s2 ? v2 : v;
  return std::exp(detail::solve_bracketed(h, a, b, fa, fb, 1e-13, 0.0, what));
}

}  // namespace

TurningPointData period(const Profile& p, double E, double w0, bool crosscheck) {
  require_admissible(p);
  if (!(E > 0.0) || !std::isfinite(E))
    throw InputError("E must be positive; at E = 0 only the stationary trajectory exists");
  if (w0 == 0.0 || !std::isfinite(w0)) throw InputError("period needs a finite w0 != 0");
  TurningPointData d;
  d.E = E;
  d.w0 = w0;
  const double aw = std::abs(w0);
  Radial rad{p, std::sqrt(2.0 * E) / aw};
  d.rho_star = p.f_inverse(rad.Y);
  d.T = 2.0 * rad.I(kHalfPi) / aw;
  d.z_T = std::copysign(2.0 * rad.Y * rad.Y * rad.J(kHalfPi), w0);
  if (crosscheck) {
    DynamicsOptions opts;
    opts.ode.rtol = 1e-12;
    opts.ode.atol = 1e-14;
    auto tr = integrate_planar(p, 0.0, std::sqrt(2.0 * E), 0.0, w0, E, 1.25 * d.T, opts);
    if (!tr.sigma_times.empty()) d.T_ode = tr.sigma_times.front();
  }
  return d;
}

PlanarTrajectory geodesic_from_sigma(const Profile& p, double z0, double theta0, double E,
                                     double w0, double t_max, const DynamicsOptions& opts) {
  if (!(E > 0.0)) throw InputError("E must be positive");
  return integrate_planar(p, 0.0, std::sqrt(2.0 * E), z0, w0, E, t_max, opts, theta0);
}

SynthesisResult cut_from_sigma(const Profile& p, double E, double w0, double z0) {
  require_admissible(p);
  if (!(E > 0.0)) throw InputError("E must be positive");
  SynthesisResult res;
  res.certified = true;
  if (w0 == 0.0) {
    res.meta = "straight ray from the axis, never cut";
    return res;
  }
  auto d = period(p, E, w0);
  res.t_cut = d.T;
  res.length = std::sqrt(2.0 * E) * d.T;
  res.cut_point = Point{0.0, 0.0, z0 + d.z_T};
  res.meta = "first return to the axis at the period";
  return res;
}

BranchValues branch_values(const Profile& p, double rho_bar, double w0) {
  require_admissible(p);
  if (!(rho_bar > 0.0)) throw InputError("branch values need rho_bar > 0");
  BranchValues b;
  const double fb = p.f(rho_bar);
  b.w_star = 1.0 / fb;
  if (!(w0 > 0.0) || w0 > b.w_star * (1.0 + 1e-12))
    throw InputError("branch values need 0 < w0 <= 1/f(rho_bar)");
  Radial rad{p, 1.0 / w0};
  const double u = std::asin(std::min(1.0, w0 * fb));
  const double I1 = rad.I(u), J1 = rad.J(u);
  const double I_full = rad.I(kHalfPi), J_full = rad.J(kHalfPi);
  const double Y2 = rad.Y * rad.Y;
  b.t1 = I1 / w0;
  b.z1 = Y2 * J1;
  b.t2 = (2.0 * I_full - I1) / w0;
  b.z2 = Y2 * (2.0 * J_full - J1);
  return b;
}

DistanceResult distance_from_sigma(const Profile& p, const Point& q0, const Point& target) {
  require_admissible(p);
  const double scale = std::max({1.0, std::abs(q0.z), q0.r()});
  if (q0.r() > 1e-12 * scale) throw InputError("distance_from_sigma needs a base point on the axis");
  DistanceResult res;
  const double rho = target.r();
  const double dz = target.z - q0.z;
  const double Z = std::abs(dz);
  auto exact = [&](double v, double tol, std::string witness) {
    res.value = v;
    res.tol = tol;
    res.lower = std::max(0.0, v - tol);
    res.upper = v + tol;
    res.witness = std::move(witness);
    return res;
  };
  if (dz == 0.0) return exact(rho, 0.0, "straight ray");

  if (rho < 1e-8) {
    // the axis itself: first return of the trajectory with z_T = |dz|
    double w = solve_in_w([&](double x) { return unit_zT(p, x); }, Z, 1.0, false,
                          "distance to the axis");
    double T = unit_period(p, w);
    return exact(T, 1e-11 * T,
                 "axis return, w0=" + fmt(std::copysign(w, dz)) + ", t=" + fmt(T));
  }

  const double fb = p.f(rho);
  const double w_star = 1.0 / fb;
  auto z1 = [&](double w) {
    Radial rad{p, 1.0 / w};
    return rad.Y * rad.Y * rad.J(std::asin(std::min(1.0, w * fb)));
  };
  auto z2 = [&](double w) {
    Radial rad{p, 1.0 / w};
    return rad.Y * rad.Y * (2.0 * rad.J(kHalfPi) - rad.J(std::asin(std::min(1.0, w * fb))));
  };
  const double z_junction = z1(w_star);
  // Both branches meet at w_star; the root is found below it by halving w
  // until the branch value crosses Z (z1 -> 0 and z2 -> inf as w -> 0).
  auto below_star = [&](auto&& zb, const char* what) {
    auto h = [&](double s) { return zb(std::exp(s)) - Z; };
    double s_hi = std::log(w_star), v_hi = z_junction - Z;
    if (v_hi == 0.0) return w_star;
    double s_lo = s_hi, v_lo = v_hi;
    for (int k = 0; (v_lo < 0.0) == (v_hi < 0.0); ++k) {
      if (k == 60)
        throw NumericalError(std::string(what) + ": bracket expansion failed",
                             {{"z_target", Z}, {"w_last", std::exp(s_lo)}, {"rho", rho}});
      s_lo -= std::log(2.0);
      v_lo = h(s_lo);
    }
    double s_root = detail::solve_bracketed(h, s_lo, s_hi, v_lo, v_hi, 1e-13, 0.0, what);
    return std::min(std::exp(s_root), w_star);
  };
  double w, t;
  std::string branch;
  if (Z <= z_junction) {
    w = below_star(z1, "outbound branch");
    Radial rad{p, 1.0 / w};
    t = rad.I(std::asin(std::min(1.0, w * fb))) / w;
    branch = "outbound";
  } else {
    w = below_star(z2, "return branch");
    Radial rad{p, 1.0 / w};
    t = (2.0 * rad.I(kHalfPi) - rad.I(std::asin(std::min(1.0, w * fb)))) / w;
    branch = "return";
  }
  return exact(t, 1e-10 * std::max(1.0, t),
               branch + " branch, w0=" + fmt(std::copysign(w, dz)) + ", t=" + fmt(t));
}

std::vector<BallSample> ball_boundary_from_sigma(const Profile& p, const Point& q0,
                                                 double radius, int n_samples) {
  require_admissible(p);
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InputError("radius must be positive");
  if (n_samples < 3) throw InputError("ball boundary needs at least 3 samples");
  // parameter whose first return happens exactly at t = radius
  const double w_delta = solve_in_w([&](double w) { return unit_period(p, w); }, radius, 1.0,
                                    false, "ball boundary");
  std::vector<BallSample> half;
  half.push_back({0.0, radius, radius, 0.0});
  const double w_lo = 1e-3 * w_delta;
  const int m = n_samples - 1;
  DynamicsOptions opts;
  opts.ode.rtol = 1e-11;
  opts.ode.atol = 1e-13;
  for (int k = 0; k < m; ++k) {
    double w = k == m - 1 ? w_delta : w_lo * std::pow(w_delta / w_lo, double(k) / (m - 1));
    if (k == m - 1) {
      half.push_back({w, radius, 0.0, unit_zT(p, w)});
      continue;
    }
    auto tr = integrate_planar(p, 0.0, 1.0, 0.0, w, 0.5, radius, opts);
    auto s = tr.sol.states().back();
    half.push_back({w, radius, std::abs(s[0]), s[2]});
  }
  std::vector<BallSample> out;
  out.reserve(2 * half.size() - 1);
  for (auto it = half.rbegin(); it != half.rend() - 1; ++it)
    out.push_back({-it->w0, it->t, it->rho, q0.z - it->z});
  for (const auto& s : half) out.push_back({s.w0, s.t, s.rho, q0.z + s.z});
  return out;
}

double ball_box_formula(const Profile& p, const Point& q, const Point& q2) {
  const double dxy = std::hypot(q.x - q2.x, q.y - q2.y);
  const double dz = std::abs(q.z - q2.z);
  if (dz == 0.0) return dxy;
  const double fr = p.f(q.r());
  double vertical = fr > 0.0 ? dz / fr : kInfinity;
  return dxy + std::min(p.h_inverse(dz), vertical);
}

DistanceResult ball_box_bounds(const Profile& p, const Point& q, const Point& q2, double c_v) {
  require_admissible(p);
  if (!(c_v >= 1.0)) throw InputError("ball-box constant must be >= 1");
  DistanceResult res;
  const double dxy = std::hypot(q.x - q2.x, q.y - q2.y);
  const double dz = std::abs(q.z - q2.z);
  res.lower = ball_box_formula(p, q, q2) / c_v;
  if (dz == 0.0) {
    res.upper = dxy;
    res.witness = "competitor 1: horizontal segment";
    return res;
  }
  // competitor 1: horizontal segment, vertical leg at the larger weight
  const double fmax = std::max(p.f(q.r()), p.f(q2.r()));
  double c1 = fmax > 0.0 ? dxy + dz / fmax : kInfinity;
  // competitor 2: radially in to the axis, the axis minimizer, out to q2
  const double axis = distance_from_sigma(p, Point{0.0, 0.0, q.z}, Point{0.0, 0.0, q2.z}).value;
  const double c2 = q.r() + axis + q2.r();
  // competitor 3: along q's ray to radius h(|dz|), vertical there, then straight to q2
  const double rho = p.h_inverse(dz);
  double ex = 1.0, ey = 0.0;
  if (q.r() > 0.0) {
    ex = q.x / q.r();
    ey = q.y / q.r();
  }
  const double c3 = std::abs(q.r() - rho) + dz / p.f(rho) + std::hypot(q2.x - rho * ex, q2.y - rho * ey);
  res.upper = std::min({c1, c2, c3});
  if (res.upper == c1)
    res.witness = "competitor 1: horizontal then vertical segment";
  else if (res.upper == c2)
    res.witness = "competitor 2: through the axis";
  else
    res.witness = "competitor 3: vertical leg at radius h(|dz|)";
  return res;
}

BallBoxCalibration calibrate_ball_box(const Profile& p, double half_box, int n_pairs,
                                      std::uint64_t seed) {
  require_admissible(p);
  if (!(half_box > 0.0) || n_pairs < 1) throw InputError("calibration needs a box and pairs");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-half_box, half_box);
  BallBoxCalibration cal;
  cal.half_box = half_box;
  for (int k = 0; k < n_pairs; ++k) {
    Point a{0.0, 0.0, u(rng)};
    Point b{u(rng), u(rng), u(rng)};
    double d = distance_from_sigma(p, a, b).value;
    double F = k % 2 == 0 ? ball_box_formula(p, a, b) : ball_box_formula(p, b, a);
    if (d == 0.0 || F == 0.0) continue;
    cal.c_v = std::max({cal.c_v, d / F, F / d});
    ++cal.samples;
  }
  return cal;
}

}  // namespace grushin
