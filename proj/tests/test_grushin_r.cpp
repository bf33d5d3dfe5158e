#include <doctest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "grushin/errors.hpp"
#include "grushin/grushin_r.hpp"
#include "grushin/riemannian.hpp"
#include "oracles.hpp"

using namespace grushin;
using namespace grushin::linear;
using std::numbers::pi;

namespace {

const Profile kLin = Profile::monomial(1.0);

double dist(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z); }

Point rotate(const Point& q, double a, double dz) {
  return {std::cos(a) * q.x - std::sin(a) * q.y, std::sin(a) * q.x + std::cos(a) * q.y, q.z + dz};
}

}  // namespace

TEST_CASE("extrema and invariants") {
  CHECK(w0_from_extrema(0.6, 0.8) == doctest::Approx(1.0).epsilon(1e-15));
  auto [a, b] = extrema_from_invariants(0.48, 1.0);
  CHECK(a == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(b == doctest::Approx(0.8).epsilon(1e-14));
  auto [a0, b0] = extrema_from_invariants(0.0, 2.0);
  CHECK(a0 == 0.0);
  CHECK(b0 == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(extrema_from_invariants(0.3, 0.0), InputError);
}

TEST_CASE("params from covector") {
  gen::Gen g(51);
  for (int i = 0; i < 200; ++i) {
    Point q = g.point_off_axis(2.0, 1e-3);
    Covector l = g.unit_covector(kLin, q, 1e-3);
    auto par = params_from_covector(q, l);
    CAPTURE(q.x);
    CAPTURE(l.u0);
    CHECK(w0_from_extrema(par.r_min, par.r_max) == doctest::Approx(std::abs(l.w0)).epsilon(1e-12));
    CHECK(std::abs(par.r_min * par.r_max * std::abs(l.w0) - std::abs(angular_momentum(q, l))) < 1e-12);
    const double delta = par.r_max * par.r_max - par.r_min * par.r_min;
    // L carries a factor |w0| next to the chart expression
    CHECK(std::abs(std::abs(l.w0) * delta * std::sin(par.phi) * std::cos(par.phi) - radial_momentum(q, l)) <
          1e-12 * std::max(1.0, delta));
    CHECK(par.r_min <= par.r0 * (1 + 1e-12));
    CHECK(par.r0 <= par.r_max * (1 + 1e-12));
    CHECK(par.r0 * par.r0 == doctest::Approx(par.r_min * par.r_min + delta * std::pow(std::sin(par.phi), 2)).epsilon(1e-10));
    CHECK(par.phi > -pi / 2);
    CHECK(par.phi <= pi / 2);
  }
  // start at r_min with L = 0
  Point q{0.6, 0, 0};
  auto par = params_from_covector(q, {0.0, 0.8, 1.0});
  CHECK(par.phi == 0.0);
  CHECK(par.r_min == doctest::Approx(0.6));
  CHECK_THROWS_AS(params_from_covector(q, {0.0, 1.0, 0.0}), InputError);
  CHECK_THROWS_AS(params_from_covector(q, {0.0, 1.0, 1.0}), InputError);
}

TEST_CASE("closed form agrees with the ODE") {
  gen::Gen g(52);
  double worst = 0.0;
  for (int i = 0; i < 30; ++i) {
    Point q = g.point(1.5);
    Covector l = g.unit_covector(kLin, q, 0.05);
    const double T = 2 * pi / std::abs(l.w0);
    auto tr = integrate_cartesian(kLin, q, l, T);
    ClosedFormGeodesic cf(q, l);
    for (int k = 0; k <= 60; ++k) {
      double t = T * k / 60;
      worst = std::max({worst, dist(tr.position(t), cf.position(t)), dist(tr.position(t), exp_r(q, l, t))});
    }
  }
  CHECK(worst < 1e-7);
}

TEST_CASE("closed form structure") {
  gen::Gen g(53);
  for (int i = 0; i < 50; ++i) {
    Point q = g.point_off_axis(1.5, 0.05);
    Covector l = g.unit_covector(kLin, q, 0.05);
    ClosedFormGeodesic cf(q, l);
    const auto& par = cf.params();
    for (double t : {0.0, 0.3, 1.7, 4.0}) {
      double r = cf.r(t), s = cf.s(t);
      CHECK(r * r == doctest::Approx(par.r_min * par.r_min +
                                     (par.r_max * par.r_max - par.r_min * par.r_min) * std::sin(s) * std::sin(s))
                         .epsilon(1e-13));
      CHECK(cf.position(t).r() == doctest::Approx(r).epsilon(1e-12));
    }
    // theta against the arctan form with the branch counter
    if (par.K > 0 && std::abs(par.phi) < 1.5) {
      double th0 = std::atan2(q.y, q.x);
      for (int k = 1; k < 40; ++k) {
        double t = 3 * pi / std::abs(l.w0) * k / 40.3;
        double s = cf.s(t);
        if (std::abs(std::cos(s)) < 1e-3) continue;
        CHECK(cf.theta(t) == doctest::Approx(oracle::theta_arctan(th0, par.r_min, par.r_max, par.phi,
                                                                  std::abs(l.w0), t))
                                 .epsilon(1e-10));
      }
    }
  }
  // poles of the shell: constant radius
  ClosedFormGeodesic circ({1, 0, 0}, {0, std::sqrt(0.5), std::sqrt(0.5)});
  for (double t : {0.5, 2.0, 9.0}) CHECK(std::abs(circ.r(t) - 1.0) < 1e-12);
  // cut time height
  Point q{0.4, -0.7, 0.3};
  Covector l = normalize_energy(kLin, q, {0.2, 0.1, -0.9});
  ClosedFormGeodesic cf(q, l);
  const double ts = pi / std::abs(l.w0);
  CHECK(cf.z(ts) - q.z == doctest::Approx(-pi / (2 * l.w0 * l.w0)).epsilon(1e-12));
}

TEST_CASE("eta is the antiderivative of sin^2") {
  for (double x : {1e-4, 0.05, 0.5, 2.0, 7.0}) {
    CHECK(eta(x) == doctest::Approx(0.5 * (x - std::sin(x) * std::cos(x))).epsilon(1e-12));
    double h = 1e-5;
    CHECK((eta(x + h) - eta(x - h)) / (2 * h) == doctest::Approx(std::sin(x) * std::sin(x)).epsilon(1e-7));
  }
}

TEST_CASE("D vanishes at 0 and pi/w0 only") {
  gen::Gen g(54);
  for (int i = 0; i < 40; ++i) {
    double a = g.uniform(0.0, 1.0), b = a + g.uniform(0.05, 2.0);
    double phi = g.uniform(-1.5, 1.5);
    double w = w0_from_extrema(a, b);
    CHECK(jacobian_D(0.0, a, b, phi) == doctest::Approx(0.0));
    CHECK(std::abs(jacobian_D(pi / w, a, b, phi)) < 1e-12 * std::max(1.0, b * b / (a + 1e-3)));
    double sign = 0.0;
    for (int k = 1; k < 500; ++k) {
      double d = jacobian_D(pi / w * k / 500, a, b, phi);
      if (sign == 0.0) sign = d > 0 ? 1 : -1;
      CHECK(d * sign > 0.0);
    }
    CHECK(first_zero_of_D(a, b, phi) == doctest::Approx(pi / w).epsilon(1e-10));
  }
}

TEST_CASE("D limit charts") {
  // r_min = 0: the zero condition is w t = tan(w t + phi) - tan(phi)
  double b = 0.9, w = 1 / b;
  for (double phi : {0.2, 0.7, 1.3}) {
    for (int k = 1; k < 200; ++k) {
      double t = pi / w * k / 200;
      if (std::abs(std::cos(w * t + phi)) < 1e-6) continue;
      CHECK(std::abs(w * t - (std::tan(w * t + phi) - std::tan(phi))) > 0.0);
    }
    CHECK(first_zero_of_D(0.0, b, phi) == doctest::Approx(pi / w).epsilon(1e-10));
  }
  // L = 0 at r_max
  for (double a : {0.1, 0.5}) {
    double bb = 1.2, ww = w0_from_extrema(a, bb);
    auto reduced = [&](double t) { return std::sin(ww * t) * (ww * ww * ww * t * a * a * std::cos(ww * t) - std::sin(ww * t)); };
    for (double t : {0.3, 1.0, 2.0})
      CHECK(jacobian_D(t, a, bb, pi / 2) * std::sqrt(a * a + (bb * bb - a * a) * std::pow(std::cos(ww * t), 2)) ==
            doctest::Approx(reduced(t)).epsilon(1e-12));
    CHECK(first_zero_of_D(a, bb, pi / 2) == doctest::Approx(pi / ww).epsilon(1e-10));
    CHECK(first_zero_of_D(a, bb, 0.0) == doctest::Approx(pi / ww).epsilon(1e-10));
  }
  // K = L = 0 has a double zero at pi/w0
  CHECK(first_zero_of_D(0.0, 1.0, 0.0) == doctest::Approx(pi).epsilon(1e-8));
}

TEST_CASE("F is increasing and meets w0^3 t only at the ends") {
  gen::Gen g(55);
  for (int i = 0; i < 20; ++i) {
    double a = g.uniform(0.05, 1.0), b = a + g.uniform(0.05, 2.0), phi = g.uniform(0.05, 1.5);
    double w = w0_from_extrema(a, b);
    double prev = -1e300;
    int crossings = 0;
    double prev_gap = 0.0, prev_den = 0.0;
    const int n = 2000;
    for (int k = 0; k <= n; ++k) {
      double t = pi / w * k / n;
      double F = F_function(t, a, b, phi);
      double den = -a * a * std::tan(phi) * std::sin(w * t + phi) - b * b * std::cos(w * t + phi);
      // F has a pole where den changes sign; compare only within one branch
      if (std::abs(den) < 1e-3 || den * prev_den < 0.0) {
        prev = -1e300;
        prev_gap = 0.0;
        prev_den = den;
        continue;
      }
      prev_den = den;
      if (prev > -1e300) CHECK(F > prev);
      prev = F;
      double gap = F - w * w * w * t;
      if (k > 1 && k < n && gap * prev_gap < 0) ++crossings;  // gap(0) is roundoff
      prev_gap = gap;
    }
    CHECK(std::abs(F_function(0.0, a, b, phi)) < 1e-12);
    CHECK(crossings == 0);
  }
}

TEST_CASE("factorization against the full determinant") {
  gen::Gen g(56);
  for (int i = 0; i < 10; ++i) {
    // base on the positive x axis and u0, v0, w0 > 0 give w0, K, L > 0
    Point q{g.uniform(0.2, 1.0), 0.0, g.uniform(-1.0, 1.0)};
    Covector l = normalize_energy(kLin, q, {g.uniform(0.1, 1.0), g.uniform(0.1, 1.0), g.uniform(0.2, 1.0)});
    auto par = params_from_covector(q, l);
    const double w = l.w0, delta = par.r_max * par.r_max - par.r_min * par.r_min;
    for (double frac : {0.3, 0.7, 0.9}) {
      double t = frac * pi / w;
      double full = full_determinant(kLin, Chart::KW, q, l, t);
      double predicted = jacobian_D(t, par.r_min, par.r_max, par.phi) / (w * (-delta * std::pow(w, 4)));
      CHECK(std::abs(full - predicted) <= 1e-4 * std::abs(full));
    }
  }
}

TEST_CASE("conjugate and cut times") {
  CHECK(conjugate_time({1, 0, 0}, normalize_energy(kLin, {1, 0, 0}, {0.5, 0.5, 0.5})) ==
        doctest::Approx(pi / std::abs(normalize_energy(kLin, {1, 0, 0}, {0.5, 0.5, 0.5}).w0)));
  CHECK(conjugate_time({1, 0, 0}, {std::sqrt(0.75), 0, 0.5}) == doctest::Approx(2 * pi));
  CHECK(std::isinf(conjugate_time({1, 0, 0}, {1, 0, 0})));
  auto res = cut_time_and_locus({1, 0, 0}, {0, 0, 1});
  CHECK(res.t_cut == doctest::Approx(pi));
  REQUIRE(res.cut_point);
  CHECK(res.cut_point->x == -1.0);
  CHECK(res.cut_point->z == doctest::Approx(pi / 2));
  CHECK(on_cut_locus({1, 0, 0}, *res.cut_point));
  CHECK(std::isinf(cut_time_and_locus({1, 0, 0}, {1, 0, 0}).t_cut));
  CHECK_THROWS_AS(cut_time_and_locus({0, 0, 0}, {1, 0, 0}), InputError);
  // all covectors with the same w0 reach the same point
  gen::Gen g(57);
  Point q{0.3, 0.9, -0.2};
  const double w0 = 0.7;
  const double rho = std::sqrt(1 - q.r() * q.r() * w0 * w0);
  Point first{};
  for (int i = 0; i < 20; ++i) {
    double psi = g.uniform(-pi, pi);
    Covector l{rho * std::cos(psi), rho * std::sin(psi), w0};
    Point e = exp_r(q, l, pi / w0);
    if (i == 0) first = e;
    CHECK(dist(e, first) < 1e-12);
    CHECK(dist(e, *cut_time_and_locus(q, l).cut_point) < 1e-12);
  }
  CHECK_FALSE(on_cut_locus(q, {-q.x, -q.y, q.z + 0.5 * pi * q.r() * q.r() * 0.99}));
}

TEST_CASE("distance examples") {
  CHECK(distance_r({1, 0, 0}, {2, 0, 0}).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(distance_r({1, 0, 0}, {-1, 0, pi / 2}).value == doctest::Approx(pi).epsilon(1e-12));
  // the quarter oscillation rho = cos t reaches the axis at height pi/4
  CHECK(distance_r({1, 0, 0}, {0, 0, pi / 4}).value == doctest::Approx(pi / 2).epsilon(1e-10));
  CHECK(distance_r({1, 0, 0}, {0, 0, 0}).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(distance_r({1, 2, 3}, {1, 2, 3}).value == 0.0);
}

TEST_CASE("distance agrees with forward shooting") {
  gen::Gen g(58);
  for (int i = 0; i < 60; ++i) {
    Point q = g.point_off_axis(2.0, 1e-2);
    Covector l = g.unit_covector(kLin, q);
    double t = g.uniform(0.02, 0.98) * (l.w0 == 0 ? 3.0 : std::min(3.0, pi / std::abs(l.w0)));
    Point e = exp_r(q, l, t);
    auto d = distance_r(q, e);
    CAPTURE(t);
    CHECK(std::abs(d.value - t) < 1e-8 * std::max(1.0, t));
  }
}

TEST_CASE("distance is a metric with the expected symmetries") {
  gen::Gen g(59);
  for (int i = 0; i < 40; ++i) {
    Point a = g.point_off_axis(2.0, 1e-3), b = g.point_off_axis(2.0, 1e-3), c = g.point_off_axis(2.0, 1e-3);
    double ab = distance_r(a, b).value, ba = distance_r(b, a).value;
    double bc = distance_r(b, c).value, ac = distance_r(a, c).value;
    CHECK(std::abs(ab - ba) < 1e-9);
    CHECK(ac <= ab + bc + 1e-8);
    double ang = g.uniform(-pi, pi), dz = g.uniform(-2, 2);
    CHECK(distance_r(rotate(a, ang, dz), rotate(b, ang, dz)).value == doctest::Approx(ab).epsilon(1e-9));
  }
}

TEST_CASE("distance matches the axis synthesis") {
  gen::Gen g(60);
  auto lin = Profile::monomial(1.0);
  for (int i = 0; i < 30; ++i) {
    Point a = g.axis_point(2.0), b = g.point(2.0);
    CHECK(distance_r(a, b).value == doctest::Approx(distance_from_sigma(lin, a, b).value).epsilon(1e-9));
    CHECK(distance_r(b, a).value == doctest::Approx(distance_from_sigma(lin, a, b).value).epsilon(1e-9));
  }
}

TEST_CASE("geodesic fan") {
  auto rows = exp_fan({1, 0, 0}, 0.5, 12, 21);
  REQUIRE(rows.size() == 12 * 21);
  for (std::size_t i = 20; i < rows.size(); i += 21) {
    CHECK(rows[i].t == doctest::Approx(2 * pi));
    CHECK(rows[i].x == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(rows[i].y) < 1e-12);
    CHECK(rows[i].z == doctest::Approx(pi / (2 * 0.25)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(exp_fan({1, 0, 0}, 2.0, 4, 4), InputError);
}
