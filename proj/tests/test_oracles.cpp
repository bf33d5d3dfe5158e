#include <doctest.h>

#include <cmath>

#include "oracles.hpp"

// The oracles are only useful if they are right on cases with known answers.

TEST_CASE("pi_alpha constants agree with the Gamma closed form") {
  CHECK(oracle::pi_alpha_gamma(1.0) == doctest::Approx(oracle::kPiAlpha1).epsilon(1e-14));
  CHECK(oracle::pi_alpha_gamma(2.0) == doctest::Approx(oracle::kPiAlpha2).epsilon(1e-14));
  CHECK(oracle::pi_alpha_gamma(3.0) == doctest::Approx(oracle::kPiAlpha3).epsilon(1e-14));
  CHECK(oracle::pi_alpha_gamma(1.5) == doctest::Approx(oracle::kPiAlpha15).epsilon(1e-14));
}

TEST_CASE("axis geodesic closes at the period") {
  auto [rho, z] = oracle::axis_geodesic_linear(2.0, oracle::kPi / 2.0);
  CHECK(std::abs(rho) < 1e-15);
  CHECK(z == doctest::Approx(oracle::kPi / 8.0));
}

TEST_CASE("segment length") {
  oracle::Weight one = [](double) { return 1.0; };
  CHECK(oracle::segment_length_gl({0, 0, 0}, {1, 2, 2}, one) == doctest::Approx(3.0));
  oracle::Weight lin = [](double r) { return r; };
  // vertical segment at radius 2 costs dz / 2
  CHECK(oracle::segment_length_adaptive({2, 0, 0}, {2, 0, 1}, lin) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("polyline shortening recovers Euclidean distance") {
  oracle::Weight one = [](double) { return 1.0; };
  auto bent = [](double s) { return oracle::Vec3{s, std::sin(3.14159 * s), 0.0}; };
  CHECK(oracle::shortest_polyline(bent, one, 40) == doctest::Approx(1.0).epsilon(1e-8));
}
