#include "grushin/grushin_r.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "grushin/errors.hpp"
#include "numerics.hpp"

namespace grushin::linear {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;

const Profile& linear_profile() {
  static const Profile p = Profile::monomial(1.0);
  return p;
}

void require_unit(const Point& q0, const Covector& l0, double tol) {
  if (!is_unit_energy(linear_profile(), q0, l0, tol))
    throw InputError("covector must be normalized to unit energy (2E = 1)");
}

double sinc(double x) {
  if (std::abs(x) < 1e-3) {
    double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

// (2x - sin 2x) / (4x^3), the cubic coefficient of eta
double s2(double x) {
  if (std::abs(x) < 0.1) {
    double y = x * x;
    return 1.0 / 3.0 - y / 15.0 + 2.0 * y * y / 315.0 - y * y * y / 2835.0 +
           y * y * y * y / 77962.5;
  }
  return (2.0 * x - std::sin(2.0 * x)) / (4.0 * x * x * x);
}

// continuous branch of arctan((b/a) tan x)
double Phi(double x, double a, double b) {
  double sn = std::sin(x), cs = std::cos(x);
  return x + std::atan2((b - a) * sn * cs, a * cs * cs + b * sn * sn);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

DistanceResult exact(double v, std::string witness) {
  DistanceResult d;
  d.value = v;
  d.tol = 1e-10 * std::max(1.0, v);
  d.lower = std::max(0.0, v - d.tol);
  d.upper = v + d.tol;
  d.witness = std::move(witness);
  return d;
}

using V3 = Eigen::Vector3d;

V3 exp_residual(const Point& q0, const V3& p, const Point& q1) {
  Point e = exp_r(q0, Covector{p[0], p[1], p[2]}, 1.0);
  return {e.x - q1.x, e.y - q1.y, e.z - q1.z};
}

struct NewtonOutcome {
  bool converged = false;
  V3 p;
  double residual = 0.0;
};

// Damped Newton on Exp(p) = q1 with a central-difference Jacobian.
NewtonOutcome newton(const Point& q0, const Point& q1, V3 p, double tol) {
  NewtonOutcome out;
  V3 R = exp_residual(q0, p, q1);
  double nr = R.norm();
  int polish = 0;
  for (int it = 0; it < 80; ++it) {
    if (nr <= tol && ++polish > 2) break;
    Eigen::Matrix3d J;
    const double h = 1e-7 * (1.0 + p.norm());
    for (int j = 0; j < 3; ++j) {
      V3 e = V3::Zero();
      e[j] = h;
      J.col(j) = (exp_residual(q0, p + e, q1) - exp_residual(q0, p - e, q1)) / (2.0 * h);
    }
    V3 dp = J.fullPivLu().solve(-R);
    if (!dp.allFinite()) break;
    bool moved = false;
    for (double lam = 1.0; lam > 1e-8; lam *= 0.5) {
      V3 pn = p + lam * dp;
      V3 Rn = exp_residual(q0, pn, q1);
      if (Rn.norm() < nr || (nr <= tol && Rn.norm() <= tol)) {
        p = pn;
        R = Rn;
        nr = Rn.norm();
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  out.p = p;
  out.residual = nr;
  out.converged = nr <= tol;
  return out;
}

}  // namespace

double eta(double x) { return x * x * x * s2(x); }

double w0_from_extrema(double r_min, double r_max) {
  return 1.0 / std::sqrt(r_min * r_min + r_max * r_max);
}

std::pair<double, double> extrema_from_invariants(double K, double w0) {
  if (w0 == 0.0) throw InputError("oscillation extrema need w0 != 0");
  const double w2 = w0 * w0;
  const double disc = 1.0 - 4.0 * w2 * K * K;
  if (disc < -1e-12) throw InputError("(K, w0) lies off the unit energy shell");
  const double rmin2 = 2.0 * K * K / (1.0 + std::sqrt(std::max(0.0, disc)));
  const double rmax2 = 1.0 / w2 - rmin2;
  return {std::sqrt(rmin2), std::sqrt(rmax2)};
}

OscillationParams params_from_covector(const Point& q0, const Covector& l0) {
  if (l0.w0 == 0.0) throw InputError("oscillation parameters need w0 != 0 (straight line)");
  require_unit(q0, l0, 1e-12);
  OscillationParams par;
  par.w0 = l0.w0;
  par.r0 = q0.r();
  par.K = k_is_zero(q0, l0) ? 0.0 : angular_momentum(q0, l0);
  par.L = radial_momentum(q0, l0);
  auto [rmin, rmax] = extrema_from_invariants(par.K, par.w0);
  par.r_min = rmin;
  par.r_max = rmax;
  // sin^2 phi = a / delta and cos^2 phi = b / delta with a b = L^2 / w0^2;
  // the smaller factor is taken from the product to avoid cancellation
  const double r02 = par.r0 * par.r0;
  double a = std::max(0.0, r02 - rmin * rmin);
  double b = std::max(0.0, rmax * rmax - r02);
  const double ab = par.L * par.L / (par.w0 * par.w0);
  if (a > b && a > 0.0)
    b = ab / a;
  else if (b > 0.0)
    a = ab / b;
  if (a == 0.0 && b == 0.0) {
    par.phi = 0.0;
  } else {
    par.phi = std::atan2(std::copysign(std::sqrt(a), par.L), std::sqrt(b));
    if (par.phi <= -kHalfPi) par.phi = kHalfPi;
  }
  return par;
}

ClosedFormGeodesic::ClosedFormGeodesic(const Point& q0, const Covector& l0)
    : par_(params_from_covector(q0, l0)), q0_(q0) {
  theta0_ = par_.r0 > 0.0 ? std::atan2(q0.y, q0.x) : std::atan2(l0.v0, l0.u0);
  sign_k_ = par_.K > 0.0 ? 1.0 : (par_.K < 0.0 ? -1.0 : 0.0);
  if (par_.K == 0.0 && par_.r0 > 0.0) rho_sign_ = par_.phi < 0.0 ? -1.0 : 1.0;
}

double ClosedFormGeodesic::s(double t) const { return std::abs(par_.w0) * t + par_.phi; }

double ClosedFormGeodesic::r(double t) const {
  const double sn = std::sin(s(t));
  const double a = par_.r_min, b = par_.r_max;
  return std::sqrt(a * a + (b * b - a * a) * sn * sn);
}

double ClosedFormGeodesic::theta(double t) const {
  if (par_.K == 0.0) {
    double rho = rho_sign_ * std::sin(s(t));
    return rho >= 0.0 ? theta0_ : theta0_ + kPi;
  }
  const double a = par_.r_min, b = par_.r_max;
  return theta0_ + sign_k_ * (Phi(s(t), a, b) - Phi(par_.phi, a, b));
}

double ClosedFormGeodesic::z(double t) const {
  const double a2 = par_.r_min * par_.r_min, b2 = par_.r_max * par_.r_max;
  const double aw = std::abs(par_.w0);
  return q0_.z + par_.w0 * (a2 * t + (b2 - a2) / aw * (eta(s(t)) - eta(par_.phi)));
}

Point ClosedFormGeodesic::position(double t) const {
  if (par_.K == 0.0) {
    double rho = rho_sign_ * par_.r_max * std::sin(s(t));
    return {rho * std::cos(theta0_), rho * std::sin(theta0_), z(t)};
  }
  double rr = r(t), th = theta(t);
  return {rr * std::cos(th), rr * std::sin(th), z(t)};
}

Point exp_r(const Point& q0, const Covector& l0, double t) {
  const double pu = t * l0.u0, pv = t * l0.v0, pw = t * l0.w0;
  const double om = std::abs(pw);
  const double c = std::cos(om), sc = sinc(om);
  const double r02 = q0.x * q0.x + q0.y * q0.y;
  // harmonic motion in the plane with frequency |w0|; z integrates w0 r^2
  const double zint = 0.5 * r02 * (1.0 + sinc(2.0 * om)) + (pu * pu + pv * pv) * s2(om) +
                      (q0.x * pu + q0.y * pv) * sc * sc;
  return {q0.x * c + pu * sc, q0.y * c + pv * sc, q0.z + pw * zint};
}

double jacobian_D(double t, double r_min, double r_max, double phi) {
  const double a = r_min, b = r_max;
  if (!(a >= 0.0) || !(b > a)) throw InputError("jacobian_D needs 0 <= r_min < r_max");
  const double w = w0_from_extrema(a, b), w3 = w * w * w;
  const double a2 = a * a, b2 = b * b;
  double val;
  if (phi == 0.0) {
    // L = 0 at r_min, rescaled by sin(phi) cos(phi)
    const double s = w * t, sn = std::sin(s), cs = std::cos(s);
    val = sn * (w3 * t * b2 * cs - sn);
  } else if (std::abs(std::abs(phi) - kHalfPi) <= 1e-15) {
    // L = 0 at r_max, same rescaling
    const double sn = std::sin(w * t), cs = std::cos(w * t);
    val = sn * (w3 * t * a2 * cs - sn);
  } else {
    const double s = w * t + phi, sn = std::sin(s), cs = std::cos(s);
    const double tp = std::tan(phi), ct = 1.0 / tp;
    val = w3 * t * ((ct * b2 - tp * a2) * sn * cs + a2 * sn * sn - b2 * cs * cs) + 2.0 * sn * cs -
          tp * cs * cs - ct * sn * sn;
  }
  if (a == 0.0) return val;  // Euclidean chart: the 1/r(t) factor cancels
  const double sn = std::sin(w * t + phi);
  return val / std::sqrt(a2 + (b2 - a2) * sn * sn);
}

double F_function(double t, double r_min, double r_max, double phi) {
  const double w = w0_from_extrema(r_min, r_max);
  const double s = w * t + phi, tp = std::tan(phi);
  return (tp * std::cos(s) - std::sin(s)) /
         (-r_min * r_min * tp * std::sin(s) - r_max * r_max * std::cos(s));
}

double first_zero_of_D(double r_min, double r_max, double phi) {
  const double w = w0_from_extrema(r_min, r_max);
  const double t_end = 1.5 * kPi / w;
  auto D = [&](double t) { return jacobian_D(t, r_min, r_max, phi); };
  const double h = 1e-7 * t_end;
  auto dD = [&](double t) { return (D(t + h) - D(t - h)) / (2.0 * h); };
  auto bisect = [](auto&& g, double lo, double hi) {
    double glo = g(lo);
    for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
      double mid = 0.5 * (lo + hi), gm = g(mid);
      if ((gm < 0.0) == (glo < 0.0) && gm != 0.0) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };
  const int n = 599;
  double scale = 0.0;
  std::vector<double> ts(n + 1), ds(n + 1), ps(n + 1);
  for (int k = 1; k <= n; ++k) {
    ts[k] = t_end * k / n;
    ds[k] = D(ts[k]);
    ps[k] = dD(ts[k]);
    scale = std::max(scale, std::abs(ds[k]));
  }
  for (int k = 2; k <= n; ++k) {
    if ((ds[k - 1] < 0.0) != (ds[k] < 0.0) || ds[k] == 0.0)
      return bisect(D, ts[k - 1], ts[k]);
    if ((ps[k - 1] < 0.0) != (ps[k] < 0.0)) {
      double tc = bisect(dD, ts[k - 1], ts[k]), dc = D(tc);
      // two close zeros inside one cell show up as a sign flip at the extremum
      if ((dc < 0.0) != (ds[k - 1] < 0.0)) return bisect(D, ts[k - 1], tc);
      if (std::abs(dc) <= 1e-9 * scale) return tc;
    }
  }
  return kInfinity;
}

double conjugate_time(const Point& q0, const Covector& l0) {
  require_unit(q0, l0, 1e-9);
  return l0.w0 == 0.0 ? kInfinity : kPi / std::abs(l0.w0);
}

SynthesisResult cut_time_and_locus(const Point& q0, const Covector& l0) {
  if (!(q0.r() > 0.0)) throw InputError("cut locus from a Riemannian point needs r0 > 0");
  require_unit(q0, l0, 1e-9);
  SynthesisResult res;
  res.certified = true;
  if (l0.w0 == 0.0) {
    res.meta = "straight line, never cut";
    return res;
  }
  const double w = l0.w0;
  res.t_cut = kPi / std::abs(w);
  res.length = res.t_cut;
  res.cut_point = Point{0.0 - q0.x, 0.0 - q0.y, q0.z + std::copysign(kPi / (2.0 * w * w), w)};
  res.meta = "antipodal meeting of all geodesics with the same w0";
  return res;
}

bool on_cut_locus(const Point& q0, const Point& q, double tol) {
  const double r0 = q0.r();
  if (!(r0 > 0.0)) return false;
  const double scale = std::max(1.0, r0);
  if (std::hypot(q.x + q0.x, q.y + q0.y) > tol * scale) return false;
  return std::abs(q.z - q0.z) >= kPi * r0 * r0 / 2.0 * (1.0 - tol);
}

DistanceResult distance_from_axis(const Point& axis_point, const Point& target) {
  const double scale = std::max({1.0, std::abs(axis_point.z), axis_point.r()});
  if (axis_point.r() > 1e-12 * scale) throw InputError("base point must lie on the axis");
  const double rho = target.r();
  const double dz = target.z - axis_point.z, Z = std::abs(dz);
  if (Z == 0.0) return exact(rho, "straight ray");
  if (rho == 0.0) {
    double t = std::sqrt(2.0 * kPi * Z);
    return exact(t, "axis return, w0=" + fmt(std::copysign(std::sqrt(kPi / (2.0 * Z)), dz)));
  }
  // axis geodesic: rho = sin(x)/w, z = eta(x)/w^2 with x = w t in (0, pi],
  // so eta(x)/sin^2(x) = Z/rho^2 fixes x
  const double m = std::log(Z / (rho * rho));
  auto g = [m](double x) { return std::log(eta(x)) - 2.0 * std::log(std::sin(x)) - m; };
  double lo = 1.0, glo = g(lo);
  for (int k = 0; glo > 0.0; ++k) {
    if (k == 1100) throw NumericalError("axis inversion: lower bracket failed", {{"Z", Z}});
    lo *= 0.5;
    glo = g(lo);
  }
  double eps = kPi - 1.0, hi = 1.0, ghi = glo;
  for (int k = 0; ghi < 0.0; ++k) {
    if (k == 1100) throw NumericalError("axis inversion: upper bracket failed", {{"Z", Z}});
    hi = kPi - eps;
    ghi = g(hi);
    eps *= 0.5;
  }
  if (hi < lo) hi = lo;
  double x = detail::solve_bracketed(g, lo, hi, glo, ghi, 0.0, 4e-16, "axis inversion");
  const double w = std::sin(x) / rho;
  const double t = x / w;
  return exact(t, "axis geodesic, w0=" + fmt(std::copysign(w, dz)) + ", t=" + fmt(t));
}

DistanceResult distance_r(const Point& q0, const Point& q1) {
  const double scale = 1.0 + std::hypot(q0.r(), q0.z) + std::hypot(q1.r(), q1.z);
  if (q0.x == q1.x && q0.y == q1.y && q0.z == q1.z) return exact(0.0, "same point");
  if (q0.r() <= 1e-12 * scale) return distance_from_axis(Point{0.0, 0.0, q0.z}, q1);
  if (q1.r() <= 1e-12 * scale) return distance_from_axis(Point{0.0, 0.0, q1.z}, q0);
  const double dz = q1.z - q0.z;
  if (on_cut_locus(q0, q1, 1e-12)) {
    double t = std::sqrt(2.0 * kPi * std::abs(dz));
    return exact(t, "cut point, w0=" + fmt(std::copysign(kPi / t, dz)) + ", t=" + fmt(t));
  }

  const double r0 = q0.r(), r1 = q1.r();
  const double dxy = std::hypot(q1.x - q0.x, q1.y - q0.y);
  // length of an admissible competitor bounds the geodesic length
  const double bound =
      std::min(dxy + std::abs(dz) / std::max(r0, r1), r0 + std::sqrt(2.0 * kPi * std::abs(dz)) + r1);
  const double tol = 1e-12 * scale;

  struct Seed {
    V3 p;
    double res;
  };
  auto seeds_for = [&](int n_psi, int n_beta, int n_tau) {
    std::vector<Seed> seeds;
    const double psi0 = std::atan2(q1.y - q0.y, q1.x - q0.x);
    for (int i = 0; i < n_psi; ++i) {
      double psi = psi0 + 2.0 * kPi * i / n_psi;
      for (int j = 0; j < n_beta; ++j) {
        double beta = -kHalfPi + kPi * (j + 0.5) / n_beta;
        double t_star = std::sin(beta) == 0.0 ? kInfinity : kPi * r0 / std::abs(std::sin(beta));
        for (int k = 1; k <= n_tau; ++k) {
          double t = std::min(bound, 0.999 * t_star) * k / (n_tau + 0.5);
          V3 p(t * std::cos(psi) * std::cos(beta), t * std::sin(psi) * std::cos(beta),
               t * std::sin(beta) / r0);
          seeds.push_back({p, exp_residual(q0, p, q1).norm()});
        }
      }
    }
    std::sort(seeds.begin(), seeds.end(),
              [](const Seed& a, const Seed& b) { return a.res < b.res; });
    V3 straight(q1.x - q0.x, q1.y - q0.y, 0.0);
    seeds.insert(seeds.begin(), {straight, exp_residual(q0, straight, q1).norm()});
    return seeds;
  };

  auto length = [r0](const V3& p) { return std::hypot(p[0], p[1], r0 * p[2]); };
  auto attempt = [&](const std::vector<Seed>& seeds, std::size_t max_runs) {
    double best = kInfinity;
    V3 best_p = V3::Zero();
    std::size_t runs = 0;
    for (const auto& sd : seeds) {
      if (runs++ >= max_runs) break;
      auto out = newton(q0, q1, sd.p, tol);
      // inside the injectivity domain the solution is the unique minimizer
      if (out.converged && std::abs(out.p[2]) <= kPi * (1.0 + 1e-9)) {
        double L = length(out.p);
        if (L < best) {
          best = L;
          best_p = out.p;
        }
        break;
      }
    }
    return std::make_pair(best, best_p);
  };

  auto [t, p] = attempt(seeds_for(8, 9, 3), 12);
  if (!std::isfinite(t)) std::tie(t, p) = attempt(seeds_for(16, 17, 8), 4000);
  if (!std::isfinite(t))
    throw NumericalError("exponential inversion did not converge",
                         {{"x1", q1.x}, {"y1", q1.y}, {"z1", q1.z}, {"r0", r0}});
  const double w = p[2] / t;
  return exact(t, "geodesic, w0=" + fmt(w) + ", t=" + fmt(t));
}

std::vector<FanRow> exp_fan(const Point& q0, double w0, int n_geodesics, int n_times) {
  if (w0 == 0.0) throw InputError("geodesic fan needs w0 != 0");
  if (n_geodesics < 1 || n_times < 2) throw InputError("geodesic fan needs samples");
  const double r0 = q0.r();
  const double rho2 = 1.0 - r0 * r0 * w0 * w0;
  if (rho2 < 0.0) throw InputError("|w0| exceeds 1/r0 on the unit energy shell");
  const double rho = std::sqrt(rho2);
  const double T = kPi / std::abs(w0);
  std::vector<FanRow> rows;
  rows.reserve(static_cast<std::size_t>(n_geodesics) * n_times);
  for (int i = 0; i < n_geodesics; ++i) {
    double psi = 2.0 * kPi * i / n_geodesics;
    Covector l{rho * std::cos(psi), rho * std::sin(psi), w0};
    double phi = r0 > 0.0 ? params_from_covector(q0, normalize_energy(linear_profile(), q0, l)).phi
                          : 0.0;
    for (int j = 0; j < n_times; ++j) {
      double t = T * j / (n_times - 1);
      Point e = exp_r(q0, l, t);
      rows.push_back({w0, phi, t, e.x, e.y, e.z});
    }
  }
  return rows;
}

}  // namespace grushin::linear
