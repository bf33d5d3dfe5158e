#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace grushin {

enum class ProfileKind { Monomial, MonoLog };

// Radial weight f(r) = r^alpha * log(1+r)^beta (beta = 0 for Monomial).
// Immutable after construction.
class Profile {
 public:
  static Profile monomial(double alpha);
  static Profile monolog(double alpha, double beta);
  // "monomial:alpha=<a>" or "monolog:alpha=<a>,beta=<b>", case-insensitive.
  static Profile parse(std::string_view text);

  ProfileKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  std::string name() const;
  // f(r) = r, the integrable case.
  bool is_linear() const { return alpha_ == 1.0 && beta_ == 0.0; }
  // Parameters inside the admissible family (alpha >= 1, beta >= 0).
  bool admissible() const { return alpha_ >= 1.0 && beta_ >= 0.0; }

  double f(double r) const;
  double df(double r) const;
  double d2f(double r) const;

  // Continuous extension of f f'/r at r = 0.
  double ffprime_over_r_at_0() const;
  // f f'/r, switching to the r = 0 limit below 1e-8.
  double ffprime_over_r(double r) const;

  // Odd extension g(rho) = sign(rho) f(|rho|).
  double g(double rho) const;
  double gsq(double rho) const;
  // g(rho) g'(rho) = sign(rho) f f'(|rho|)
  double g_gdot(double rho) const;
  // (g^2)'' = 2 (f'^2 + f f''), continuous at 0.
  double gsq_deriv2(double rho) const;

  // r f'(r)/f(r), between alpha and alpha+beta.
  double log_slope(double r) const;
  // Inverse of f and of r -> r f(r).
  double f_inverse(double y) const;
  double h_inverse(double s) const;

 private:
  Profile(ProfileKind k, double a, double b) : kind_(k), alpha_(a), beta_(b) {}

  ProfileKind kind_;
  double alpha_;
  double beta_;
};

struct ValidationGrid {
  double near_min = 1e-12;  // geometric grid toward r = 0
  double near_max = 1e-1;
  int near_points = 45;
  double tail_min = 1.0;  // geometric tail grid
  double tail_max = 1e6;
  int tail_points = 61;
};

struct AxiomCheck {
  int axiom = 0;
  std::string name;
  std::string status;  // "pass", "fail" or "consistent"
  double witness_r = 0.0;
  double witness_value = 0.0;
  bool ok() const { return status != "fail"; }
};

struct ValidationReport {
  std::vector<AxiomCheck> checks;
  bool all_ok() const;
};

ValidationReport validate(const Profile& p, const ValidationGrid& grid = {});

// Reference set used by the invariant suites: r, r^2, r^3 and r log(1+r)^2.
std::vector<Profile> builtin_profiles();

}  // namespace grushin
