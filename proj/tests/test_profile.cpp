#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "grushin/errors.hpp"
#include "grushin/profile.hpp"

using namespace grushin;

namespace {

const AxiomCheck* find_axiom(const ValidationReport& r, int axiom) {
  for (const auto& c : r.checks)
    if (c.axiom == axiom) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("builtin families satisfy the axioms") {
  for (const auto& p : {Profile::monomial(1.0), Profile::monolog(1.0, 2.0), Profile::monomial(2.0),
                        Profile::monomial(3.0)}) {
    CAPTURE(p.name());
    auto rep = validate(p);
    CHECK(rep.all_ok());
    CHECK(rep.checks.size() == 5);
    // the asymptotic axiom can only be observed, never proved
    REQUIRE(find_axiom(rep, 5) != nullptr);
    CHECK(find_axiom(rep, 5)->status == "consistent");
  }
}

TEST_CASE("square root profile fails the continuity axiom near zero") {
  auto rep = validate(Profile::monomial(0.5));
  CHECK_FALSE(rep.all_ok());
  const auto* c = find_axiom(rep, 3);
  REQUIRE(c != nullptr);
  CHECK(c->status == "fail");
  CHECK(c->witness_r < 1e-3);
}

TEST_CASE("inverse examples") {
  CHECK(Profile::monomial(1.0).h_inverse(4.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(Profile::monomial(2.0).h_inverse(8.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(Profile::monomial(2.0).f_inverse(9.0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(Profile::monolog(1.0, 1.0).f_inverse(2.0 * std::log(3.0)) ==
        doctest::Approx(2.0).epsilon(1e-12));
  for (const auto& p : builtin_profiles()) {
    CHECK(p.h_inverse(0.0) == 0.0);
    CHECK(p.f_inverse(0.0) == 0.0);
  }
}

TEST_CASE("inverse roundtrips on [1e-3, 1e3]") {
  gen::Gen g(11);
  for (const auto& p : builtin_profiles()) {
    CAPTURE(p.name());
    for (int i = 0; i < 300; ++i) {
      double r = g.log_uniform(1e-3, 1e3);
      CAPTURE(r);
      CHECK(std::abs(p.f_inverse(p.f(r)) - r) <= 1e-10 * r);
      CHECK(std::abs(p.h_inverse(r * p.f(r)) - r) <= 1e-10 * r);
    }
  }
}

TEST_CASE("monotone on sorted samples") {
  gen::Gen g(12);
  for (const auto& p : builtin_profiles()) {
    for (int i = 0; i < 300; ++i) {
      double a = g.log_uniform(1e-6, 1e6), b = a * (1.0 + g.log_uniform(1e-9, 1.0));
      CHECK(p.f(a) < p.f(b));
    }
  }
}

TEST_CASE("odd extension") {
  gen::Gen g(13);
  for (const auto& p : builtin_profiles()) {
    for (int i = 0; i < 100; ++i) {
      double rho = g.uniform(0.0, 5.0);
      CHECK(p.g(-rho) == -p.g(rho));
      CHECK(p.gsq(rho) == doctest::Approx(p.f(rho) * p.f(rho)).epsilon(1e-14));
      CHECK(p.gsq(-rho) == p.gsq(rho));
    }
  }
  auto lin = Profile::monomial(1.0);
  for (double rho : {-1.0, -1e-9, 0.0, 1e-9, 0.5, 3.0}) CHECK(lin.gsq_deriv2(rho) == doctest::Approx(2.0));
}

TEST_CASE("f f'/r limit at the axis") {
  CHECK(Profile::monomial(1.0).ffprime_over_r_at_0() == 1.0);
  CHECK(Profile::monomial(2.0).ffprime_over_r_at_0() == 0.0);
  CHECK(Profile::monolog(1.0, 2.0).ffprime_over_r_at_0() == 0.0);
  CHECK(Profile::monolog(1.0, 0.0).ffprime_over_r_at_0() == 1.0);
  for (const auto& p : builtin_profiles()) {
    double at0 = p.ffprime_over_r_at_0();
    CHECK(std::abs(p.f(1e-6) * p.df(1e-6) / 1e-6 - at0) < 1e-5);
  }
}

TEST_CASE("profile string parsing") {
  auto p = Profile::parse("MonoLog:Alpha=1,Beta=2");
  CHECK(p.kind() == ProfileKind::MonoLog);
  CHECK(p.alpha() == 1.0);
  CHECK(p.beta() == 2.0);
  CHECK(Profile::parse(p.name()).beta() == 2.0);
  CHECK(Profile::parse("monomial:alpha=3").alpha() == 3.0);
  CHECK_THROWS_AS(Profile::parse("monomial"), InputError);
  CHECK_THROWS_AS(Profile::parse("cubic:alpha=1"), InputError);
  CHECK_THROWS_AS(Profile::parse("monolog:alpha=1"), InputError);
  CHECK_THROWS_AS(Profile::parse("monomial:alpha=x"), InputError);
}
