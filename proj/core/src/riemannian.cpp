#include "grushin/riemannian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "grushin/errors.hpp"
#include "numerics.hpp"

namespace grushin {

namespace {

constexpr double kPi = std::numbers::pi;

void require_base(const Profile& p, const Point& q0, const Covector& l0) {
  if (!p.admissible())
    throw InputError("profile " + p.name() + " is outside the admissible family");
  if (!(q0.r() > 0.0)) throw InputError("base point must lie off the axis");
  if (!is_unit_energy(p, q0, l0))
    throw InputError("covector must be normalized to unit energy (2E = 1)");
}

DynamicsOptions probe_options() {
  DynamicsOptions o;
  o.ode.rtol = 1e-13;
  o.ode.atol = 1e-15;
  return o;
}

Vec<5> end_state(const Profile& p, const Point& q0, const Covector& l0, double t) {
  return integrate_cartesian(p, q0, l0, t, probe_options()).sol.states().back();
}

// (r, theta, z) or (x, y, z) of the endpoint.
Vec<3> endpoint(const Profile& p, const Point& q0, const Covector& l0, double t, bool polar) {
  auto s = end_state(p, q0, l0, t);
  if (!polar) return {s[0], s[1], s[2]};
  return {std::hypot(s[0], s[1]), std::atan2(s[1], s[0]), s[2]};
}

// Central difference of g at c, Richardson-extrapolated from steps h and h/2.
// Component 1 is an angle when polar is set.
template <class G>
Vec<3> central_partial(G&& g, double c, bool polar) {
  auto diff = [&](double h) {
    auto a = g(c + h), b = g(c - h);
    Vec<3> d;
    for (int i = 0; i < 3; ++i) {
      double delta = a[i] - b[i];
      if (polar && i == 1) delta = std::remainder(delta, 2.0 * kPi);
      d[i] = delta / (2.0 * h);
    }
    return d;
  };
  const double h = 1e-5 * (1.0 + std::abs(c));
  auto d1 = diff(h), d2 = diff(0.5 * h);
  Vec<3> out;
  for (int i = 0; i < 3; ++i) out[i] = (4.0 * d2[i] - d1[i]) / 3.0;  // Richardson
  return out;
}

void require_chart(Chart chart, const Point& q0, const Covector& l0) {
  if (l0.w0 == 0.0) throw InputError(std::string(chart_name(chart)) + " chart needs w0 != 0");
  if (chart == Chart::KW &&
      std::abs(radial_momentum(q0, l0)) <= 1e-12 * std::max(1.0, q0.r()))
    throw InputError("KW chart needs L != 0");
  if (chart == Chart::LW && k_is_zero(q0, l0)) throw InputError("LW chart needs K != 0");
}

// Chart partials (index 0 and 1) of the endpoint in polar or Cartesian form.
std::array<Vec<3>, 2> chart_partials(const Profile& p, Chart chart, const Point& q0,
                                     const Covector& l0, double t, bool polar) {
  const ChartCoords c = chart_coordinates(chart, q0, l0);
  std::array<Vec<3>, 2> out;
  for (int j = 0; j < 2; ++j) {
    auto g = [&](double v) {
      ChartCoords d = c;
      (j == 0 ? d.c1 : d.c2) = v;
      return endpoint(p, q0, covector_from_chart(p, chart, q0, l0, d), t, polar);
    };
    out[j] = central_partial(g, j == 0 ? c.c1 : c.c2, polar);
  }
  return out;
}

double det3(const Vec<3>& a, const Vec<3>& b, const Vec<3>& c) {
  Eigen::Matrix3d m;
  m << a[0], b[0], c[0], a[1], b[1], c[1], a[2], b[2], c[2];
  return m.determinant();
}

// Time derivative of the endpoint in polar or Cartesian form.
Vec<3> velocity(const Profile& p, const Vec<5>& s, double w0, bool polar) {
  const double r = std::hypot(s[0], s[1]);
  const double f = p.f(r);
  if (!polar) return {s[3], s[4], w0 * f * f};
  return {(s[0] * s[3] + s[1] * s[4]) / r, (s[0] * s[4] - s[1] * s[3]) / (r * r), w0 * f * f};
}

double cartesian_determinant(const Profile& p, Chart chart, const Point& q0, const Covector& l0,
                             double t) {
  if (t <= 0.0) return 0.0;
  auto d = chart_partials(p, chart, q0, l0, t, false);
  return det3(velocity(p, end_state(p, q0, l0, t), l0.w0, false), d[0], d[1]);
}

}  // namespace

Covector symmetrize_covector(const Point& q0, const Covector& l0) {
  const double x = q0.x, y = q0.y, n = x * x + y * y;
  if (!(n > 0.0)) throw InputError("symmetrizing covector needs a base point off the axis");
  const double a = (x * x - y * y) / n, b = 2.0 * x * y / n;
  return {a * l0.u0 + b * l0.v0, b * l0.u0 - a * l0.v0, l0.w0};
}

double conjectured_cut_time(const Profile& p, const Point& q0, const Covector& l0, double t_max,
                            const DynamicsOptions& opts) {
  require_base(p, q0, l0);
  if (k_is_zero(q0, l0))
    throw InputError("conjectured cut time needs K != 0; use the axis hitting time for K = 0");
  auto tr = integrate_cylindrical(p, q0, l0, t_max, opts, kPi);
  auto t = first_crossing(
      tr.sol, [](double, const Vec<5>& s) { return s[4] - kPi; }, 0.0, +1, 1e-14);
  return t ? *t : kInfinity;
}

SigmaHit sigma_hitting_time(const Profile& p, const Point& q0, const Covector& l0,
                            const DynamicsOptions& opts) {
  if (!p.admissible())
    throw InputError("profile " + p.name() + " is outside the admissible family");
  const double r0 = q0.r();
  if (!(r0 > 0.0)) throw InputError("axis hitting time needs a base point off the axis");
  if (!k_is_zero(q0, l0)) throw InputError("axis hitting time needs K = 0");
  const double rhodot0 = radial_momentum(q0, l0) / r0;
  SigmaHit hit;
  if (l0.w0 == 0.0) {
    if (rhodot0 < 0.0) {
      hit.t = r0 / -rhodot0;
      hit.rhodot = rhodot0;
    }
    return hit;
  }
  const double w0 = l0.w0, f0 = p.f(r0);
  const double E = 0.5 * (rhodot0 * rhodot0 + w0 * w0 * f0 * f0);
  // one period of the singular start bounds the time to reach the axis
  const double bound = 1.01 * period(p, E, w0).T;
  auto tr = integrate_planar(p, r0, rhodot0, q0.z, w0, E, bound, opts, std::atan2(q0.y, q0.x));
  if (tr.sigma_times.empty())
    throw NumericalError("K = 0 trajectory did not reach the axis within one period",
                         {{"bound", bound}, {"w0", w0}});
  hit.t = tr.sigma_times.front();
  hit.rhodot = tr.sol(hit.t)[1];
  return hit;
}

Chart parse_chart(std::string_view name) {
  if (name == "KW" || name == "kw") return Chart::KW;
  if (name == "LW" || name == "lw") return Chart::LW;
  if (name == "KL" || name == "kl") return Chart::KL;
  throw InputError("unknown chart '" + std::string(name) + "' (expected KW, LW or KL)");
}

const char* chart_name(Chart c) {
  switch (c) {
    case Chart::KW:
      return "KW";
    case Chart::LW:
      return "LW";
    case Chart::KL:
      return "KL";
  }
  return "?";
}

ChartCoords chart_coordinates(Chart chart, const Point& q0, const Covector& l0) {
  const double K = angular_momentum(q0, l0), L = radial_momentum(q0, l0);
  switch (chart) {
    case Chart::KW:
      return {K, l0.w0};
    case Chart::LW:
      return {L, l0.w0};
    case Chart::KL:
      return {K, L};
  }
  return {};
}

Covector covector_from_chart(const Profile& p, Chart chart, const Point& q0, const Covector& ref,
                             ChartCoords c) {
  const double R2 = q0.x * q0.x + q0.y * q0.y;
  if (!(R2 > 0.0)) throw InputError("charts need a base point off the axis");
  const double f0 = p.f(std::sqrt(R2));
  auto root = [](double v, double sign_ref) {
    if (v < 0.0) throw InputError("chart coordinates leave the unit energy shell");
    return std::copysign(std::sqrt(v), sign_ref);
  };
  double K = 0.0, L = 0.0, w = 0.0;
  switch (chart) {
    case Chart::KW:
      K = c.c1;
      w = c.c2;
      L = root(R2 * (1.0 - f0 * f0 * w * w) - K * K, radial_momentum(q0, ref));
      break;
    case Chart::LW:
      L = c.c1;
      w = c.c2;
      K = root(R2 * (1.0 - f0 * f0 * w * w) - L * L, angular_momentum(q0, ref));
      break;
    case Chart::KL:
      K = c.c1;
      L = c.c2;
      w = root(1.0 - (K * K + L * L) / R2, ref.w0) / f0;
      break;
  }
  return {(q0.x * L - q0.y * K) / R2, (q0.y * L + q0.x * K) / R2, w};
}

double jacobian_reduced(const Profile& p, Chart chart, const Point& q0, const Covector& l0,
                        double t) {
  require_base(p, q0, l0);
  require_chart(chart, q0, l0);
  if (t <= 0.0) return 0.0;
  auto d = chart_partials(p, chart, q0, l0, t, true);
  return (d[0][0] * d[1][1] - d[1][0] * d[0][1]) / l0.w0;
}

double full_determinant(const Profile& p, Chart chart, const Point& q0, const Covector& l0,
                        double t) {
  require_base(p, q0, l0);
  require_chart(chart, q0, l0);
  if (t <= 0.0) return 0.0;
  auto d = chart_partials(p, chart, q0, l0, t, true);
  return det3(velocity(p, end_state(p, q0, l0, t), l0.w0, true), d[0], d[1]);
}

double straight_line_determinant_fd(const Profile& p, const Point& q0, const Covector& l0,
                                    double t) {
  if (!p.admissible())
    throw InputError("profile " + p.name() + " is outside the admissible family");
  if (l0.w0 != 0.0 || l0.v0 == 0.0)
    throw InputError("straight-line determinant needs w0 = 0 and v0 != 0");
  if (!is_unit_energy(p, q0, l0)) throw InputError("covector must have unit energy");
  if (t <= 0.0) return 0.0;
  const double f0 = p.f(q0.r());
  auto from = [&](double u, double w) {
    double v2 = 1.0 - u * u - f0 * f0 * w * w;
    if (v2 < 0.0) throw InputError("chart coordinates leave the unit energy shell");
    return Covector{u, std::copysign(std::sqrt(v2), l0.v0), w};
  };
  auto du = central_partial([&](double u) { return endpoint(p, q0, from(u, 0.0), t, false); },
                            l0.u0, false);
  auto dw = central_partial([&](double w) { return endpoint(p, q0, from(l0.u0, w), t, false); },
                            0.0, false);
  return det3(velocity(p, end_state(p, q0, l0, t), 0.0, false), du, dw);
}

double straight_line_determinant(const Profile& p, const Point& q0, const Covector& l0,
                                 double t) {
  if (l0.w0 != 0.0 || l0.v0 == 0.0)
    throw InputError("straight-line determinant needs w0 = 0 and v0 != 0");
  if (t <= 0.0) return 0.0;
  auto f2 = [&](double s) {
    double f = p.f(std::hypot(q0.x + s * l0.u0, q0.y + s * l0.v0));
    return f * f;
  };
  return -(t / l0.v0) * detail::tanh_sinh(f2, 0.0, t);
}

std::vector<SignChange> experimental_conjugate_search(const Profile& p, const Point& q0,
                                                      const Covector& l0, double t_max,
                                                      int grid) {
  require_base(p, q0, l0);
  if (l0.w0 == 0.0) throw InputError("conjugate search needs w0 != 0");
  if (!(t_max > 0.0) || grid < 2) throw InputError("conjugate search needs t_max > 0");
  // the polar reduction degenerates when the geodesic passes through the axis
  const bool planar = k_is_zero(q0, l0);
  auto D = [&](double t) {
    return planar ? cartesian_determinant(p, Chart::KL, q0, l0, t)
                  : jacobian_reduced(p, Chart::KL, q0, l0, t);
  };
  std::vector<SignChange> out;
  double t_prev = t_max / grid, d_prev = D(t_prev);
  for (int k = 2; k <= grid; ++k) {
    double t = t_max * k / grid, d = D(t);
    if ((d_prev < 0.0) != (d < 0.0) || d == 0.0) {
      double lo = t_prev, hi = t, dlo = d_prev;
      for (int it = 0; it < 30 && hi - lo > 1e-10 * hi; ++it) {
        double mid = 0.5 * (lo + hi), dm = D(mid);
        if ((dm < 0.0) == (dlo < 0.0) && dm != 0.0) {
          lo = mid;
          dlo = dm;
        } else {
          hi = mid;
        }
      }
      out.push_back({lo, hi});
    }
    t_prev = t;
    d_prev = d;
  }
  return out;
}

}  // namespace grushin
