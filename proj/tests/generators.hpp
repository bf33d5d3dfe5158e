#pragma once

// Seeded random inputs for the property tests.

#include <cmath>
#include <cstdint>
#include <random>

#include "grushin/dynamics.hpp"
#include "grushin/profile.hpp"

namespace gen {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  double normal() { return std::normal_distribution<double>()(rng_); }
  double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }

  grushin::Point point(double half) { return {uniform(-half, half), uniform(-half, half), uniform(-half, half)}; }

  // Uniform in the box, rejecting r < r_min.
  grushin::Point point_off_axis(double half, double r_min) {
    for (;;) {
      auto q = point(half);
      if (q.r() >= r_min) return q;
    }
  }

  grushin::Point axis_point(double half) { return {0.0, 0.0, uniform(-half, half)}; }

  // Gaussian direction scaled to 2E = 1, with |w0| >= w_min.
  grushin::Covector unit_covector(const grushin::Profile& p, const grushin::Point& q,
                                  double w_min = 0.0) {
    for (;;) {
      auto l = grushin::normalize_energy(p, q, {normal(), normal(), normal()});
      if (std::abs(l.w0) >= w_min) return l;
    }
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace gen
