#include "grushin/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "grushin/errors.hpp"

namespace grushin {

double twice_energy(const Profile& p, const Point& q0, const Covector& l0) {
  double f = p.f(q0.r());
  return l0.u0 * l0.u0 + l0.v0 * l0.v0 + f * f * l0.w0 * l0.w0;
}

double angular_momentum(const Point& q0, const Covector& l0) {
  return q0.x * l0.v0 - q0.y * l0.u0;
}

double radial_momentum(const Point& q0, const Covector& l0) {
  return q0.x * l0.u0 + q0.y * l0.v0;
}

bool k_is_zero(const Point& q0, const Covector& l0) {
  double scale = std::max(1.0, q0.r() * std::hypot(l0.u0, l0.v0));
  return std::abs(angular_momentum(q0, l0)) <= 1e-13 * scale;
}

Covector normalize_energy(const Profile& p, const Point& q0, const Covector& l0) {
  double e2 = twice_energy(p, q0, l0);
  if (!(e2 > 0.0) || !std::isfinite(e2))
    throw InputError("covector has zero energy; only the stationary trajectory exists");
  double s = 1.0 / std::sqrt(e2);
  return {l0.u0 * s, l0.v0 * s, l0.w0 * s};
}

bool is_unit_energy(const Profile& p, const Point& q0, const Covector& l0, double tol) {
  return std::abs(twice_energy(p, q0, l0) - 1.0) <= tol;
}

namespace {

void require_admissible(const Profile& p) {
  if (!p.admissible())
    throw InputError("profile " + p.name() + " is outside the admissible family");
}

void check_drift(const DriftReport& d, const DynamicsOptions& opts, double t_end) {
  if (!opts.check_drift) return;
  if (d.max_dH > opts.drift_tol || d.max_dK > opts.drift_tol)
    throw NumericalError("conserved-quantity drift exceeds drift_tol",
                         {{"max_dH", d.max_dH},
                          {"max_dK", d.max_dK},
                          {"drift_tol", opts.drift_tol},
                          {"t_end", t_end}});
}

DenseSolution<3> planar_solve(const Profile& p, double rho0, double rhodot0, double z0,
                              double w0, double t0, double t_max, const OdeOptions& ode) {
  const double w2 = w0 * w0;
  auto rhs = [&](double, const Vec<3>& s, Vec<3>& d) {
    d[0] = s[1];
    d[1] = -w2 * p.g_gdot(s[0]);
    d[2] = w0 * p.gsq(s[0]);
  };
  return dop853<3>(rhs, t0, Vec<3>{rho0, rhodot0, z0}, t_max, ode);
}

DriftReport planar_drift(const Profile& p, const DenseSolution<3>& sol, double w0, double E) {
  DriftReport d;
  for (const auto& s : sol.states()) {
    double H = 0.5 * (s[1] * s[1] + w0 * w0 * p.gsq(s[0]));
    d.max_dH = std::max(d.max_dH, std::abs(H - E));
  }
  return d;
}

std::vector<double> rho_zeros(const DenseSolution<3>& sol) {
  return crossings(sol, [](double, const Vec<3>& s) { return s[0]; }, sol.t_begin());
}

// Embed a planar step into Cartesian coordinates; the map is linear so the
// dense polynomial carries over exactly.
Vec<5> embed(const Vec<3>& s, double c, double sn) {
  return {s[0] * c, s[0] * sn, s[2], s[1] * c, s[1] * sn};
}

}  // namespace

PlanarTrajectory integrate_planar(const Profile& p, double rho0, double rhodot0, double z0,
                                  double w0, double E, double t_max,
                                  const DynamicsOptions& opts, double theta0) {
  require_admissible(p);
  if (!(t_max > 0.0)) throw InputError("t_max must be positive");
  double lhs = rhodot0 * rhodot0 + w0 * w0 * p.gsq(rho0);
  if (std::abs(lhs - 2.0 * E) > 1e-9 * std::max(1.0, 2.0 * E))
    throw InputError("planar initial data violate the energy identity");
  PlanarTrajectory tr;
  tr.w0 = w0;
  tr.E = E;
  tr.theta0 = theta0;
  tr.sol = planar_solve(p, rho0, rhodot0, z0, w0, 0.0, t_max, opts.ode);
  tr.sigma_times = rho_zeros(tr.sol);
  tr.drift = planar_drift(p, tr.sol, w0, E);
  check_drift(tr.drift, opts, t_max);
  return tr;
}

CartesianTrajectory integrate_cartesian(const Profile& p, const Point& q0, const Covector& l0,
                                        double t_max, const DynamicsOptions& opts) {
  require_admissible(p);
  if (!(t_max > 0.0)) throw InputError("t_max must be positive");
  CartesianTrajectory tr;
  const double w0 = l0.w0, w2 = w0 * w0;
  tr.w0 = w0;
  tr.H0 = 0.5 * twice_energy(p, q0, l0);
  tr.K0 = angular_momentum(q0, l0);
  const bool kzero = k_is_zero(q0, l0);
  const double r0 = q0.r();

  auto start_planar = [&](double t_start, const Vec<5>& s) {
    double r = std::hypot(s[0], s[1]);
    double th, rho, rhodot;
    if (r > 0.0) {
      th = std::atan2(s[1], s[0]);
      rho = r;
      rhodot = (s[0] * s[3] + s[1] * s[4]) / r;
    } else {
      th = std::atan2(s[4], s[3]);
      rho = 0.0;
      rhodot = std::hypot(s[3], s[4]);
    }
    tr.t_handoff = t_start;
    tr.theta_plane = th;
    if (t_start >= t_max) return;
    auto ps = planar_solve(p, rho, rhodot, s[2], w0, t_start, t_max, opts.ode);
    const double c = std::cos(th), sn = std::sin(th);
    const auto& steps = ps.steps();
    const auto& states = ps.states();
    for (std::size_t k = 0; k < steps.size(); ++k) {
      DenseStep<5> st;
      st.t0 = steps[k].t0;
      st.t1 = steps[k].t1;
      for (int j = 0; j < 8; ++j) st.c[j] = embed(steps[k].c[j], c, sn);
      tr.sol.push(st, embed(states[k + 1], c, sn));
    }
    for (double t : rho_zeros(ps)) tr.sigma_times.push_back(t);
  };

  Vec<5> y0{q0.x, q0.y, q0.z, l0.u0, l0.v0};
  if (kzero && r0 < opts.switch_radius) {
    tr.sol = DenseSolution<5>(0.0, y0);
    start_planar(0.0, y0);
  } else {
    auto rhs = [&](double, const Vec<5>& s, Vec<5>& d) {
      double r = std::hypot(s[0], s[1]);
      double k = w2 * p.ffprime_over_r(r);
      d[0] = s[3];
      d[1] = s[4];
      d[2] = w0 * p.gsq(r);
      d[3] = -k * s[0];
      d[4] = -k * s[1];
    };
    bool switched = false;
    auto stop = [&](const DenseStep<5>&, const Vec<5>& s) {
      double r = std::hypot(s[0], s[1]);
      if (kzero && r < opts.switch_radius) {
        switched = true;
        return true;
      }
      if (!kzero && r < opts.r_floor)
        throw NumericalError("K != 0 trajectory reached the axis",
                             {{"r", r}, {"K", tr.K0}, {"r_floor", opts.r_floor}});
      return false;
    };
    tr.sol = dop853<5>(rhs, 0.0, y0, t_max, opts.ode, stop);
    if (switched) {
      const double sw = opts.switch_radius;
      auto tc = first_crossing(
          tr.sol, [sw](double, const Vec<5>& s) { return std::hypot(s[0], s[1]) - sw; }, 0.0,
          -1);
      double t_sw = tc ? *tc : tr.sol.t_end();
      tr.sol.truncate(t_sw);
      start_planar(t_sw, tr.sol.states().back());
    }
  }

  for (const auto& s : tr.sol.states()) {
    double f = p.f(std::hypot(s[0], s[1]));
    double H = 0.5 * (s[3] * s[3] + s[4] * s[4] + f * f * w2);
    double K = s[0] * s[4] - s[1] * s[3];
    tr.drift.max_dH = std::max(tr.drift.max_dH, std::abs(H - tr.H0));
    tr.drift.max_dK = std::max(tr.drift.max_dK, std::abs(K - tr.K0));
  }
  check_drift(tr.drift, opts, t_max);
  return tr;
}

VariationalTrajectory integrate_variational(const Profile& p, double rho0, double rhodot0,
                                            double z0, double w0, double E, double t_max,
                                            const DynamicsOptions& opts) {
  require_admissible(p);
  if (w0 == 0.0) throw InputError("variational system needs w0 != 0");
  if (!(t_max > 0.0)) throw InputError("t_max must be positive");
  double lhs = rhodot0 * rhodot0 + w0 * w0 * p.gsq(rho0);
  if (std::abs(lhs - 2.0 * E) > 1e-9 * std::max(1.0, 2.0 * E))
    throw InputError("planar initial data violate the energy identity");
  const double w2 = w0 * w0;
  auto rhs = [&](double, const Vec<5>& s, Vec<5>& d) {
    double gg = p.g_gdot(s[0]);
    d[0] = s[1];
    d[1] = -w2 * gg;
    d[2] = w0 * p.gsq(s[0]);
    d[3] = s[4];
    d[4] = -2.0 * w0 * gg - 0.5 * w2 * p.gsq_deriv2(s[0]) * s[3];
  };
  VariationalTrajectory tr;
  tr.w0 = w0;
  tr.E = E;
  tr.sol = dop853<5>(rhs, 0.0, Vec<5>{rho0, rhodot0, z0, 0.0, 0.0}, t_max, opts.ode);
  return tr;
}

CylindricalTrajectory integrate_cylindrical(const Profile& p, const Point& q0,
                                            const Covector& l0, double t_max,
                                            const DynamicsOptions& opts, double stop_sweep) {
  require_admissible(p);
  if (!(t_max > 0.0)) throw InputError("t_max must be positive");
  const double r0 = q0.r();
  if (!(r0 > 0.0)) throw InputError("cylindrical form needs a base point off the axis");
  if (k_is_zero(q0, l0)) throw InputError("cylindrical form needs K != 0");
  CylindricalTrajectory tr;
  tr.w0 = l0.w0;
  tr.K = angular_momentum(q0, l0);
  tr.L = radial_momentum(q0, l0);
  tr.E = 0.5 * twice_energy(p, q0, l0);
  const double w2 = tr.w0 * tr.w0, K = tr.K, K2 = K * K, aK = std::abs(K), w0 = tr.w0;
  auto rhs = [&](double, const Vec<5>& s, Vec<5>& d) {
    double r = s[0];
    double ir2 = 1.0 / (r * r);
    d[0] = s[1];
    d[1] = -w2 * p.f(r) * p.df(r) + K2 * ir2 / r;
    d[2] = K * ir2;
    d[3] = w0 * p.gsq(r);
    d[4] = aK * ir2;
  };
  auto stop = [&](const DenseStep<5>&, const Vec<5>& s) {
    if (!(s[0] > opts.r_floor))
      throw NumericalError("K != 0 trajectory reached the axis", {{"r", s[0]}, {"K", K}});
    return s[4] >= stop_sweep;
  };
  Vec<5> y0{r0, tr.L / r0, std::atan2(q0.y, q0.x), q0.z, 0.0};
  tr.sol = dop853<5>(rhs, 0.0, y0, t_max, opts.ode, stop);
  for (const auto& s : tr.sol.states()) {
    double f = p.f(s[0]);
    double H = 0.5 * (s[1] * s[1] + K2 / (s[0] * s[0]) + f * f * w2);
    tr.drift.max_dH = std::max(tr.drift.max_dH, std::abs(H - tr.E));
  }
  check_drift(tr.drift, opts, t_max);
  return tr;
}

double z_w0_identity_check(const Profile& p, double w0, double E, double t) {
  if (w0 == 0.0) throw InputError("z_w0 identity needs w0 != 0");
  if (!(E > 0.0)) throw InputError("energy must be positive");
  if (t <= 0.0) return 0.0;
  DynamicsOptions fine;
  fine.ode.rtol = 1e-13;
  fine.ode.atol = 1e-15;
  fine.check_drift = false;
  const double v0 = std::sqrt(2.0 * E);
  auto var = integrate_variational(p, 0.0, v0, 0.0, w0, E, t, fine);
  auto s = var.sol.states().back();
  const double h = 1e-5 * (1.0 + std::abs(w0));
  auto z_at = [&](double w) {
    return integrate_planar(p, 0.0, v0, 0.0, w, E, t, fine).sol.states().back()[2];
  };
  double z_w = (z_at(w0 + h) - z_at(w0 - h)) / (2.0 * h);
  return std::abs(z_w - (-1.0 / w0) * s[1] * s[3]);
}

}  // namespace grushin
