#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "grushin/errors.hpp"
#include "grushin/grushin_r.hpp"
#include "grushin/riemannian.hpp"
#include "grushin/singular_synthesis.hpp"

namespace grushin::cli {

namespace {

constexpr double kPi = std::numbers::pi;

double dist(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z); }

// value <= tol passes; a thrown error fails the row with value NaN
void check(std::vector<CheckRow>& out, const Profile& p, const std::string& name, double tol,
           const std::function<double()>& fn) {
  double v;
  try {
    v = fn();
  } catch (const std::exception&) {
    v = std::nan("");
  }
  out.push_back({p.name(), name, v <= tol, v, tol});
}

Covector random_unit(const Profile& p, const Point& q, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  Covector l{n01(rng), n01(rng), n01(rng)};
  return normalize_energy(p, q, l);
}

}  // namespace

std::vector<CheckRow> run_verify(const Profile& p, const DynamicsOptions& opts) {
  std::vector<CheckRow> out;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> box(-1.0, 1.0);

  out.push_back({p.name(), "axioms", validate(p).all_ok(), 0.0, 0.0});

  check(out, p, "inverse_roundtrip", 1e-10, [&] {
    double worst = 0.0;
    for (int k = 0; k <= 60; ++k) {
      double r = std::pow(10.0, -3.0 + 6.0 * k / 60.0);
      worst = std::max(worst, std::abs(p.f_inverse(p.f(r)) - r) / r);
      worst = std::max(worst, std::abs(p.h_inverse(r * p.f(r)) - r) / r);
    }
    return worst;
  });

  check(out, p, "conservation", 1e-9, [&] {
    double worst = 0.0;
    for (int i = 0; i < 8; ++i) {
      Point q{box(rng), box(rng), box(rng)};
      Covector l = random_unit(p, q, rng);
      double T = l.w0 != 0.0 ? period(p, 0.5, l.w0).T : 10.0;
      auto tr = integrate_cartesian(p, q, l, 3.0 * std::min(T, 50.0), opts);
      worst = std::max({worst, tr.drift.max_dH, tr.drift.max_dK});
    }
    return worst;
  });

  check(out, p, "period_vs_ode", 1e-8, [&] {
    double worst = 0.0;
    for (double w0 : {0.5, 1.0, 4.0}) {
      auto tp = period(p, 0.5, w0, true);
      worst = std::max(worst, std::abs(tp.T - tp.T_ode) / tp.T);
    }
    return worst;
  });

  check(out, p, "branch_monotonicity", 0.0, [&] {
    double violations = 0.0;
    for (double rho : {0.3, 1.0, 2.0}) {
      const double ws = 1.0 / p.f(rho);
      BranchValues prev{};
      for (int k = 1; k <= 24; ++k) {
        auto b = branch_values(p, rho, ws * k / 24.0);
        if (k > 1 && (b.z1 <= prev.z1 || b.z2 >= prev.z2)) violations += 1.0;
        prev = b;
      }
    }
    return violations;
  });

  check(out, p, "rho_w0_negative", 0.0, [&] {
    double violations = 0.0;
    for (double w0 : {0.5, 1.0, 2.0}) {
      double T = period(p, 0.5, w0).T;
      auto tr = integrate_variational(p, 0.0, 1.0, 0.0, w0, 0.5, T, opts);
      for (int k = 1; k < 50; ++k)
        if (!(tr.sol(T * k / 50.0)[3] < 0.0)) violations += 1.0;
    }
    return violations;
  });

  check(out, p, "z_w0_identity", 1e-5, [&] {
    double T = period(p, 0.5, 1.0).T;
    return z_w0_identity_check(p, 1.0, 0.5, T / 3.0);
  });

  check(out, p, "symmetrizing_meet", 1e-7, [&] {
    Point q{1.0, 0.0, 0.0};
    Covector l = normalize_energy(p, q, {0.3, 0.6, 0.5});
    double T = conjectured_cut_time(p, q, l, 200.0, opts);
    auto a = integrate_cartesian(p, q, l, T, opts).position(T);
    auto b = integrate_cartesian(p, q, symmetrize_covector(q, l), T, opts).position(T);
    return dist(a, b);
  });

  check(out, p, "ball_box_bracket", 0.0, [&] {
    auto cal = calibrate_ball_box(p, 2.0, 30, 7);
    double violations = 0.0;
    std::mt19937_64 r2(11);
    std::uniform_real_distribution<double> b2(-2.0, 2.0);
    for (int i = 0; i < 10; ++i) {
      Point a{0.0, 0.0, b2(r2)}, t{b2(r2), b2(r2), b2(r2)};
      double d = distance_from_sigma(p, a, t).value;
      auto bb = ball_box_bounds(p, a, t, cal.c_v);
      if (d < bb.lower * (1.0 - 1e-9) || d > bb.upper * (1.0 + 1e-9)) violations += 1.0;
    }
    return violations;
  });

  if (p.is_linear()) {
    check(out, p, "closed_form_vs_ode", 1e-7, [&] {
      double worst = 0.0;
      for (int i = 0; i < 5; ++i) {
        Point q{box(rng), box(rng), box(rng)};
        Covector l = random_unit(p, q, rng);
        double t_end = 2.0 * kPi / std::abs(l.w0);
        auto tr = integrate_cartesian(p, q, l, t_end, opts);
        linear::ClosedFormGeodesic g(q, l);
        for (int k = 0; k <= 50; ++k) {
          double t = t_end * k / 50.0;
          worst = std::max(worst, dist(tr.position(t), g.position(t)));
        }
      }
      return worst;
    });
    check(out, p, "first_zero_of_D", 1e-8, [&] {
      double worst = 0.0;
      for (double phi : {0.0, 0.4, kPi / 2}) {
        double t = linear::first_zero_of_D(0.3, 0.9, phi);
        worst = std::max(worst, std::abs(t - kPi / linear::w0_from_extrema(0.3, 0.9)));
      }
      return worst;
    });
    check(out, p, "conjectured_cut_is_pi_over_w0", 1e-8, [&] {
      Point q{0.7, -0.2, 0.1};
      Covector l = normalize_energy(p, q, {0.4, 0.5, 0.8});
      return std::abs(conjectured_cut_time(p, q, l, 100.0, opts) - kPi / std::abs(l.w0));
    });
    check(out, p, "distance_symmetry", 1e-9, [&] {
      double worst = 0.0;
      for (int i = 0; i < 5; ++i) {
        Point a{2 * box(rng), 2 * box(rng), 2 * box(rng)}, b{2 * box(rng), 2 * box(rng), 2 * box(rng)};
        worst = std::max(worst, std::abs(linear::distance_r(a, b).value -
                                         linear::distance_r(b, a).value));
      }
      return worst;
    });
  }
  return out;
}

}  // namespace grushin::cli
