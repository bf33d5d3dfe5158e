#include "grushin/profile.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <limits>
#include <sstream>

#include "grushin/errors.hpp"

namespace grushin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// c * r^p * log(1+r)^q / (1+r)^k, with the r -> 0 limit taken from the
// leading power r^(p+q) so that 0 * inf never appears.
double term(double c, double p, double q, int k, double r) {
  if (c == 0.0) return 0.0;
  if (r == 0.0) {
    double e = p + q;
    if (e > 0.0) return 0.0;
    if (e == 0.0) return c;
    return std::copysign(kInf, c);
  }
  double v = c;
  if (p != 0.0) v *= std::pow(r, p);
  if (q != 0.0) v *= std::pow(std::log1p(r), q);
  if (k != 0) v /= std::pow(1.0 + r, k);
  return v;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double parse_number(const std::string& text, const std::string& whole) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    throw InputError("malformed profile parameter '" + text + "' in '" + whole + "'");
  return v;
}

template <class F>
double bisect_increasing(F&& fn, double y, const char* what) {
  if (!(y >= 0.0) || !std::isfinite(y))
    throw InputError(std::string(what) + ": argument must be finite and >= 0");
  if (y == 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  int doublings = 0;
  while (fn(hi) < y) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 1023)
      throw NumericalError(std::string(what) + ": bracket expansion failed",
                           {{"y", y}, {"hi", hi}});
  }
  for (int it = 0; it < 2200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (fn(mid) < y)
      lo = mid;
    else
      hi = mid;
  }
  return std::abs(fn(lo) - y) <= std::abs(fn(hi) - y) ? lo : hi;
}

// Newton on log fn(e^s) = log y. slope(r) = r fn'(r)/fn(r) stays within
// [lo, hi] for this family, so the iteration is well conditioned; bisection
// remains as the fallback for arguments where e^s leaves the double range.
template <class F, class S>
double invert_log(F&& fn, S&& slope, double y, double lo, double hi, const char* what) {
  if (!(y >= 0.0) || !std::isfinite(y))
    throw InputError(std::string(what) + ": argument must be finite and >= 0");
  if (y == 0.0) return 0.0;
  const double ly = std::log(y);
  double s = ly / (y < 1.0 ? hi : lo);
  for (int it = 0; it < 60; ++it) {
    double r = std::exp(s);
    double v = fn(r);
    if (!(r > 0.0) || !(v > 0.0) || !std::isfinite(v)) break;
    double ds = (std::log(v) - ly) / slope(r);
    s -= ds;
    if (std::abs(ds) <= 1e-15 * std::max(1.0, std::abs(s))) return std::exp(s);
  }
  return bisect_increasing(fn, y, what);
}

}  // namespace

Profile Profile::monomial(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw InputError("monomial profile needs alpha > 0");
  return Profile(ProfileKind::Monomial, alpha, 0.0);
}

Profile Profile::monolog(double alpha, double beta) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw InputError("monolog profile needs alpha > 0");
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw InputError("monolog profile needs beta >= 0");
  return Profile(ProfileKind::MonoLog, alpha, beta);
}

Profile Profile::parse(std::string_view text_in) {
  std::string norm = trim(lower(text_in));
  auto colon = norm.find(':');
  if (colon == std::string::npos)
    throw InputError("profile string '" + std::string(text_in) + "' lacks ':'");
  std::string family = trim(norm.substr(0, colon));
  std::string rest = norm.substr(colon + 1);

  double alpha = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
  std::stringstream ss(rest);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw InputError("profile parameter '" + item + "' lacks '='");
    std::string key = trim(item.substr(0, eq));
    std::string val = trim(item.substr(eq + 1));
    double v = parse_number(val, std::string(text_in));
    if (key == "alpha" && std::isnan(alpha))
      alpha = v;
    else if (key == "beta" && std::isnan(beta))
      beta = v;
    else
      throw InputError("unknown or repeated profile key '" + key + "'");
  }
  if (family == "monomial") {
    if (std::isnan(alpha) || !std::isnan(beta))
      throw InputError("monomial profile takes exactly alpha");
    return monomial(alpha);
  }
  if (family == "monolog") {
    if (std::isnan(alpha) || std::isnan(beta))
      throw InputError("monolog profile takes alpha and beta");
    return monolog(alpha, beta);
  }
  throw InputError("unknown profile family '" + family + "'");
}

std::string Profile::name() const {
  std::ostringstream os;
  os.precision(17);
  if (kind_ == ProfileKind::Monomial)
    os << "monomial:alpha=" << alpha_;
  else
    os << "monolog:alpha=" << alpha_ << ",beta=" << beta_;
  return os.str();
}

double Profile::f(double r) const { return term(1.0, alpha_, beta_, 0, r); }

double Profile::df(double r) const {
  const double a = alpha_, b = beta_;
  double v = term(a, a - 1.0, b, 0, r);
  if (b != 0.0) v += term(b, a, b - 1.0, 1, r);
  return v;
}

double Profile::d2f(double r) const {
  const double a = alpha_, b = beta_;
  double v = term(a * (a - 1.0), a - 2.0, b, 0, r);
  if (b != 0.0) {
    v += term(2.0 * a * b, a - 1.0, b - 1.0, 1, r);
    v += term(b * (b - 1.0), a, b - 2.0, 2, r);
    v -= term(b, a, b - 1.0, 2, r);
  }
  return v;
}

double Profile::ffprime_over_r_at_0() const {
  // f f'/r ~ (a+b) r^(2(a+b-1)) near 0
  double e = alpha_ + beta_ - 1.0;
  if (e > 0.0) return 0.0;
  if (e == 0.0) return 1.0;
  return kInf;
}

double Profile::ffprime_over_r(double r) const {
  if (r < 1e-8) return ffprime_over_r_at_0();
  return f(r) * df(r) / r;
}

double Profile::g(double rho) const {
  double v = f(std::abs(rho));
  return rho < 0.0 ? -v : v;
}

double Profile::gsq(double rho) const {
  double v = f(std::abs(rho));
  return v * v;
}

double Profile::g_gdot(double rho) const {
  double r = std::abs(rho);
  double v = f(r) * df(r);
  return rho < 0.0 ? -v : v;
}

double Profile::gsq_deriv2(double rho) const {
  double r = std::abs(rho);
  if (r == 0.0) return 2.0 * ffprime_over_r_at_0();
  double fv = f(r);
  double d1 = df(r);
  double ffpp = fv == 0.0 ? 0.0 : fv * d2f(r);
  return 2.0 * (d1 * d1 + ffpp);
}

double Profile::log_slope(double r) const {
  if (beta_ == 0.0) return alpha_;
  if (r < 1e-8) return alpha_ + beta_;
  return alpha_ + beta_ * r / ((1.0 + r) * std::log1p(r));
}

double Profile::f_inverse(double y) const {
  if (beta_ == 0.0 && y >= 0.0 && std::isfinite(y)) return std::pow(y, 1.0 / alpha_);
  return invert_log([this](double r) { return f(r); }, [this](double r) { return log_slope(r); },
                    y, alpha_, alpha_ + beta_, "f_inverse");
}

double Profile::h_inverse(double s) const {
  if (beta_ == 0.0 && s >= 0.0 && std::isfinite(s)) return std::pow(s, 1.0 / (alpha_ + 1.0));
  return invert_log([this](double r) { return r * f(r); },
                    [this](double r) { return 1.0 + log_slope(r); }, s, alpha_ + 1.0,
                    alpha_ + beta_ + 1.0, "h_inverse");
}

bool ValidationReport::all_ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const AxiomCheck& c) { return c.ok(); });
}

namespace {

std::vector<double> geometric(double a, double b, int n) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  double la = std::log(a), lb = std::log(b);
  for (int i = 0; i < n; ++i) out.push_back(std::exp(la + (lb - la) * i / (n - 1)));
  return out;
}

}  // namespace

ValidationReport validate(const Profile& p, const ValidationGrid& grid) {
  ValidationReport rep;
  auto near = geometric(grid.near_min, grid.near_max, grid.near_points);
  auto tail = geometric(grid.tail_min, grid.tail_max, grid.tail_points);
  auto mid = geometric(grid.near_max, grid.tail_min, 20);
  std::vector<double> all;
  all.insert(all.end(), near.begin(), near.end());
  all.insert(all.end(), mid.begin() + 1, mid.end());
  all.insert(all.end(), tail.begin() + 1, tail.end());

  {
    AxiomCheck c{1, "f(0)=0 and f>0 on (0,inf)", "pass"};
    if (p.f(0.0) != 0.0) {
      c.status = "fail";
      c.witness_value = p.f(0.0);
    }
    for (double r : all) {
      if (c.status == "fail") break;
      if (!(p.f(r) > 0.0)) {
        c.status = "fail";
        c.witness_r = r;
        c.witness_value = p.f(r);
      }
    }
    rep.checks.push_back(c);
  }
  {
    AxiomCheck c{2, "f is C2 away from 0", "pass"};
    for (double r : geometric(1e-3, 1e3, 40)) {
      double h = 1e-4 * r;
      double d1 = p.df(r), d2 = p.d2f(r);
      double fd1 = (p.f(r + h) - p.f(r - h)) / (2 * h);
      double fd2 = (p.df(r + h) - p.df(r - h)) / (2 * h);
      bool bad = !std::isfinite(d1) || !std::isfinite(d2) ||
                 std::abs(fd1 - d1) > 1e-6 * (1 + std::abs(d1)) ||
                 std::abs(fd2 - d2) > 1e-6 * (1 + std::abs(d2));
      if (bad) {
        c.status = "fail";
        c.witness_r = r;
        c.witness_value = d2;
        break;
      }
    }
    rep.checks.push_back(c);
  }
  {
    AxiomCheck c{3, "f f'/r continuous at 0", "pass"};
    double lim = p.ffprime_over_r_at_0();
    double prev = kInf;
    if (!std::isfinite(lim)) {
      // no finite limit: report the blow-up at the innermost grid point
      c.status = "fail";
      c.witness_r = near.front();
      c.witness_value = p.f(near.front()) * p.df(near.front()) / near.front();
    }
    for (auto it = near.rbegin(); c.status == "pass" && it != near.rend(); ++it) {
      double r = *it;
      double v = p.f(r) * p.df(r) / r;
      double dist = std::abs(v - lim);
      c.witness_r = r;
      c.witness_value = v;
      if (!std::isfinite(lim) || !std::isfinite(v) || dist > prev * (1 + 1e-9) + 1e-15) {
        c.status = "fail";
        break;
      }
      prev = dist;
    }
    if (c.status == "pass") c.witness_r = c.witness_value = 0.0;
    rep.checks.push_back(c);
  }
  {
    AxiomCheck c{4, "f strictly increasing and unbounded", "pass"};
    for (std::size_t i = 1; i < all.size(); ++i) {
      if (!(p.f(all[i]) > p.f(all[i - 1]))) {
        c.status = "fail";
        c.witness_r = all[i];
        c.witness_value = p.f(all[i]);
        break;
      }
    }
    if (c.status == "pass" && !(p.f(grid.tail_max) > 1e3 * p.f(grid.tail_min))) {
      c.status = "fail";
      c.witness_r = grid.tail_max;
      c.witness_value = p.f(grid.tail_max);
    }
    rep.checks.push_back(c);
  }
  {
    // asymptotic claim; only growth on the tail grid can be observed
    AxiomCheck c{5, "f^2/f' grows without bound", "consistent"};
    auto q = [&](double r) { return p.f(r) * p.f(r) / p.df(r); };
    for (std::size_t i = 1; i < tail.size(); ++i) {
      if (!(q(tail[i]) > q(tail[i - 1]))) {
        c.status = "fail";
        c.witness_r = tail[i];
        c.witness_value = q(tail[i]);
        break;
      }
    }
    if (c.status != "fail" && !(q(grid.tail_max) > 1e3 * q(grid.tail_min))) {
      c.status = "fail";
      c.witness_r = grid.tail_max;
      c.witness_value = q(grid.tail_max);
    }
    rep.checks.push_back(c);
  }
  return rep;
}

std::vector<Profile> builtin_profiles() {
  return {Profile::monomial(1.0), Profile::monomial(2.0), Profile::monomial(3.0),
          Profile::monolog(1.0, 2.0)};
}

}  // namespace grushin
