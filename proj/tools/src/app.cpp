#include "app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <set>

#include <CLI11.hpp>

#include "export.hpp"
#include "grushin/errors.hpp"
#include "grushin/grushin_r.hpp"
#include "grushin/riemannian.hpp"
#include "grushin/singular_synthesis.hpp"
#include "verify.hpp"

namespace grushin::cli {

namespace {

constexpr double kPi = std::numbers::pi;

struct Tolerances {
  std::optional<double> rtol, atol, drift_tol;
};

struct Context {
  Profile profile = Profile::monomial(1.0);
  DynamicsOptions dyn;
  std::string format;
  std::ostream* out = nullptr;
};

Point to_point(std::array<double, 3> a) { return {a[0], a[1], a[2]}; }
Covector to_covector(std::array<double, 3> a) { return {a[0], a[1], a[2]}; }

json point_json(const Point& p) { return json::array({p.x, p.y, p.z}); }

bool on_axis(const Point& q) {
  return q.r() <= 1e-12 * (1.0 + std::abs(q.z) + q.r());
}

double positive_tolerance(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw InputError(std::string(what) + " must be a positive number");
  return v;
}

void emit_table(const Context& ctx, const Table& t) {
  if (ctx.format == "json")
    write_json(*ctx.out, table_to_json(t));
  else
    write_csv(*ctx.out, t);
}

void emit_object(const Context& ctx, const json& j) {
  if (ctx.format == "csv") throw InputError("this command only exports JSON");
  write_json(*ctx.out, j);
}

json distance_json(const DistanceResult& d) {
  return {{"value", number_or_null(d.value)}, {"lower", number_or_null(d.lower)},
          {"upper", number_or_null(d.upper)}, {"witness", d.witness},
          {"tol", number_or_null(d.tol)}};
}

// --- geodesic ---------------------------------------------------------------

struct GeodesicArgs {
  std::string q0, lam, frame = "cartesian";
  double t_max = 0.0;
  int samples = 201;
};

void cmd_geodesic(const Context& ctx, const GeodesicArgs& a) {
  const Point q0 = to_point(parse_triple(a.q0, "--q0"));
  const Covector l0 = to_covector(parse_triple(a.lam, "--lam"));
  if (a.samples < 2) throw InputError("--samples must be at least 2");
  const auto& p = ctx.profile;
  Table t;
  auto time = [&](int k) { return a.t_max * k / (a.samples - 1); };
  if (a.frame == "cylindrical") {
    t.columns = {"t", "r", "theta", "z", "rdot"};
    if (q0.r() > 0.0 && !k_is_zero(q0, l0)) {
      auto tr = integrate_cylindrical(p, q0, l0, a.t_max, ctx.dyn);
      for (int k = 0; k < a.samples; ++k) {
        auto s = tr.sol(time(k));
        t.rows.push_back({time(k), s[0], s[2], s[3], s[1]});
      }
    } else {
      // K = 0: the motion stays in a vertical plane, theta only flips at the axis
      auto tr = integrate_cartesian(p, q0, l0, a.t_max, ctx.dyn);
      double theta = q0.r() > 0.0 ? std::atan2(q0.y, q0.x) : std::atan2(l0.v0, l0.u0);
      for (int k = 0; k < a.samples; ++k) {
        auto s = tr.state(time(k));
        double r = std::hypot(s[0], s[1]);
        if (r > 0.0) {
          double raw = std::atan2(s[1], s[0]);
          theta = raw + 2.0 * kPi * std::round((theta - raw) / (2.0 * kPi));
        }
        double rdot = r > 0.0 ? (s[0] * s[3] + s[1] * s[4]) / r : std::hypot(s[3], s[4]);
        t.rows.push_back({time(k), r, theta, s[2], rdot});
      }
    }
  } else if (a.frame == "cartesian") {
    t.columns = {"t", "x", "y", "z", "u", "v", "w0", "H", "K"};
    auto tr = integrate_cartesian(p, q0, l0, a.t_max, ctx.dyn);
    for (int k = 0; k < a.samples; ++k) {
      auto s = tr.state(time(k));
      double f = p.f(std::hypot(s[0], s[1]));
      double H = 0.5 * (s[3] * s[3] + s[4] * s[4] + f * f * l0.w0 * l0.w0);
      double K = s[0] * s[4] - s[1] * s[3];
      t.rows.push_back({time(k), s[0], s[1], s[2], s[3], s[4], l0.w0, H, K});
    }
  } else {
    throw InputError("--frame must be cartesian or cylindrical");
  }
  emit_table(ctx, t);
}

// --- cut-time ---------------------------------------------------------------

void cmd_cut_time(const Context& ctx, const std::string& q0s, const std::string& lams,
                  double t_max) {
  const Point q0 = to_point(parse_triple(q0s, "--q0"));
  const Covector l0 = to_covector(parse_triple(lams, "--lam"));
  const auto& p = ctx.profile;
  const double two_e = twice_energy(p, q0, l0);
  if (!(two_e > 0.0)) throw InputError("covector has zero energy");
  const double speed = std::sqrt(two_e);
  json j;
  if (on_axis(q0)) {
    auto res = cut_from_sigma(p, 0.5 * two_e, l0.w0, q0.z);
    j = {{"t_cut", number_or_null(res.t_cut)},
         {"cut_point", res.cut_point ? point_json(*res.cut_point) : json(nullptr)},
         {"certified", true},
         {"bound", "exact"},
         {"method", res.meta}};
  } else {
    const Covector unit = normalize_energy(p, q0, l0);
    if (p.is_linear()) {
      auto res = linear::cut_time_and_locus(q0, unit);
      j = {{"t_cut", number_or_null(res.t_cut / speed)},
           {"cut_point", res.cut_point ? point_json(*res.cut_point) : json(nullptr)},
           {"certified", true},
           {"bound", "exact"},
           {"method", res.meta}};
    } else if (!k_is_zero(q0, unit)) {
      double T = conjectured_cut_time(p, q0, unit, t_max * speed, ctx.dyn);
      json cp = nullptr;
      if (std::isfinite(T)) cp = point_json(integrate_cartesian(p, q0, unit, T, ctx.dyn).position(T));
      j = {{"t_cut", number_or_null(T / speed)},
           {"cut_point", cp},
           {"certified", false},
           {"bound", "upper"},
           {"method", "angular sweep reaches pi; meets the symmetrizing geodesic"}};
    } else {
      auto hit = sigma_hitting_time(p, q0, unit, ctx.dyn);
      j = {{"t_cut", number_or_null(hit.t / speed)},
           {"cut_point", nullptr},
           {"certified", false},
           {"bound", "lower"},
           {"method", "minimizing at least until the axis is reached"}};
    }
  }
  emit_object(ctx, j);
}

// --- distance ---------------------------------------------------------------

void cmd_distance(const Context& ctx, const std::string& from, const std::string& to,
                  std::optional<double> c_v, int pairs) {
  const Point a = to_point(parse_triple(from, "--from"));
  const Point b = to_point(parse_triple(to, "--to"));
  const auto& p = ctx.profile;
  DistanceResult d;
  if (p.is_linear()) {
    d = linear::distance_r(a, b);
  } else if (on_axis(a)) {
    d = distance_from_sigma(p, Point{0.0, 0.0, a.z}, b);
  } else if (on_axis(b)) {
    d = distance_from_sigma(p, Point{0.0, 0.0, b.z}, a);
  } else {
    double c = c_v ? positive_tolerance(*c_v, "--c-v") : calibrate_ball_box(p, 2.0, pairs, 1).c_v;
    d = ball_box_bounds(p, a, b, c);
  }
  emit_object(ctx, distance_json(d));
}

// --- ball ---------------------------------------------------------------------

void cmd_ball(const Context& ctx, const std::string& center, double radius, int samples,
              const std::string& mesh_path, int angles) {
  const Point c = to_point(parse_triple(center, "--center"));
  if (!on_axis(c)) throw InputError("ball boundary needs a center on the axis");
  auto pts = ball_boundary_from_sigma(ctx.profile, Point{0.0, 0.0, c.z}, radius, samples);
  Table t{{"w0", "t", "rho", "z"}, {}};
  for (const auto& s : pts) t.rows.push_back({s.w0, s.t, s.rho, s.z});
  emit_table(ctx, t);
  if (!mesh_path.empty()) {
    if (angles < 3) throw InputError("--angles must be at least 3");
    std::ofstream os(mesh_path);
    if (!os) throw InputError("cannot open mesh output " + mesh_path);
    Table m{{"i", "j", "x", "y", "z"}, {}};
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (int j = 0; j < angles; ++j) {
        double th = 2.0 * kPi * j / angles;
        m.rows.push_back({double(i), double(j), pts[i].rho * std::cos(th),
                          pts[i].rho * std::sin(th), pts[i].z});
      }
    write_csv(os, m);
  }
}

// --- period ---------------------------------------------------------------------

void cmd_period(const Context& ctx, double w0, double energy, bool crosscheck) {
  if (!(energy > 0.0)) throw InputError("--energy must be positive");
  auto tp = period(ctx.profile, energy, w0, crosscheck);
  emit_object(ctx, {{"rho_star", tp.rho_star}, {"T", tp.T}, {"w0", tp.w0}, {"E", tp.E},
                    {"z_T", tp.z_T}, {"T_ode", number_or_null(tp.T_ode)}});
}

// --- conjugate --------------------------------------------------------------------

void cmd_conjugate(const Context& ctx, const std::string& q0s, const std::string& lams,
                   std::optional<double> t_max, bool experimental, int grid) {
  const Point q0 = to_point(parse_triple(q0s, "--q0"));
  const Covector l0 = to_covector(parse_triple(lams, "--lam"));
  const auto& p = ctx.profile;
  if (!p.is_linear() && !experimental)
    throw InputError("conjugate times for this profile need --experimental");
  const double speed = std::sqrt(twice_energy(p, q0, l0));
  if (!(speed > 0.0)) throw InputError("covector has zero energy");
  const Covector unit = normalize_energy(p, q0, l0);
  json list = json::array();
  if (!experimental) {
    double tc = linear::conjugate_time(q0, unit);
    if (std::isfinite(tc))
      list.push_back({{"t_lo", tc / speed}, {"t_hi", tc / speed}, {"certified", true}});
  } else {
    if (unit.w0 == 0.0) {
      emit_object(ctx, list);
      return;
    }
    double horizon = t_max ? *t_max * speed : 3.0 * period(p, 0.5, unit.w0).T;
    for (const auto& sc : experimental_conjugate_search(p, q0, unit, horizon, grid))
      list.push_back({{"t_lo", sc.t_lo / speed}, {"t_hi", sc.t_hi / speed}, {"certified", false}});
  }
  emit_object(ctx, list);
}

// --- verify -----------------------------------------------------------------------

int cmd_verify(const Context& ctx, bool all_profiles) {
  std::vector<Profile> profiles = all_profiles ? builtin_profiles() : std::vector{ctx.profile};
  std::vector<CheckRow> rows;
  for (const auto& p : profiles) {
    auto r = run_verify(p, ctx.dyn);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  bool ok = std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
  if (ctx.format == "json") {
    json arr = json::array();
    for (const auto& r : rows)
      arr.push_back({{"profile", r.profile}, {"check", r.check}, {"status", r.pass ? "pass" : "fail"},
                     {"value", number_or_null(r.value)}, {"tol", r.tol}});
    write_json(*ctx.out, arr);
  } else {
    *ctx.out << "profile,check,status,value,tol\n";
    for (const auto& r : rows)
      *ctx.out << '"' << r.profile << "\"," << r.check << ',' << (r.pass ? "pass" : "fail") << ','
               << csv_number(r.value) << ',' << csv_number(r.tol) << '\n';
  }
  return ok ? 0 : 1;
}

// --- fan ----------------------------------------------------------------------------

void cmd_fan(const Context& ctx, const std::string& q0s, double w0, int geodesics, int times) {
  if (!ctx.profile.is_linear()) throw InputError("the geodesic fan is only available for f(r) = r");
  const Point q0 = to_point(parse_triple(q0s, "--q0"));
  Table t{{"w0", "phi", "t", "x", "y", "z"}, {}};
  for (const auto& r : linear::exp_fan(q0, w0, geodesics, times))
    t.rows.push_back({r.w0, r.phi, r.t, r.x, r.y, r.z});
  emit_table(ctx, t);
}

// --- driver ---------------------------------------------------------------------------

void print_error(std::ostream& err, const char* kind, const std::string& msg,
                 const Diagnostics& diag = {}) {
  json j = {{"error", kind}, {"message", msg}};
  if (!diag.empty()) {
    json d = json::object();
    for (const auto& [k, v] : diag) d[k] = number_or_null(v);
    j["diagnostics"] = d;
  }
  err << j.dump() << '\n';
}

std::string config_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + config_value(v[i]);
    return s;
  }
  throw InputError("config values must be strings, numbers, booleans or arrays");
}

// Translates a JSON run configuration into an argument list.
std::vector<std::string> load_config(const std::string& path, Tolerances& tol) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot read config " + path);
  json cfg;
  try {
    cfg = json::parse(is);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!cfg.is_object()) throw InputError("config must be a JSON object");
  static const std::set<std::string> keys{"command", "profile", "format", "output", "args",
                                          "tolerances"};
  for (const auto& [k, v] : cfg.items())
    if (!keys.count(k)) throw InputError("unknown config key '" + k + "'");
  if (!cfg.contains("command") || !cfg["command"].is_string())
    throw InputError("config needs a string 'command'");
  std::vector<std::string> args{cfg["command"].get<std::string>()};
  for (const char* k : {"profile", "format", "output"})
    if (cfg.contains(k)) {
      args.push_back(std::string("--") + k);
      args.push_back(config_value(cfg[k]));
    }
  if (cfg.contains("args")) {
    if (!cfg["args"].is_object()) throw InputError("config 'args' must be an object");
    for (const auto& [k, v] : cfg["args"].items()) {
      if (v.is_boolean()) {
        if (v.get<bool>()) args.push_back("--" + k);
        continue;
      }
      args.push_back("--" + k);
      args.push_back(config_value(v));
    }
  }
  if (cfg.contains("tolerances")) {
    const auto& t = cfg["tolerances"];
    if (!t.is_object()) throw InputError("config 'tolerances' must be an object");
    for (const auto& [k, v] : t.items()) {
      if (!v.is_number()) throw InputError("tolerance '" + k + "' must be a number");
      double x = positive_tolerance(v.get<double>(), k.c_str());
      if (k == "rtol")
        tol.rtol = x;
      else if (k == "atol")
        tol.atol = x;
      else if (k == "drift_tol")
        tol.drift_tol = x;
      else
        throw InputError("unknown tolerance '" + k + "'");
    }
  }
  return args;
}

int dispatch(std::vector<std::string> args, const Tolerances& tol, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Geodesics, cut loci and distances of radial Grushin structures", "grushin"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string profile_text = "monomial:alpha=1", format, output;
  auto* profile_opt = app.add_option("--profile", profile_text, "monomial:alpha=A or monolog:alpha=A,beta=B");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("-o,--output", output, "write the export here instead of stdout");

  Context ctx;
  std::function<int()> action;
  auto run_void = [&](auto fn) {
    action = [fn] {
      fn();
      return 0;
    };
  };

  // geodesic
  GeodesicArgs ga;
  auto* geo = app.add_subcommand("geodesic", "integrate one geodesic and export samples");
  geo->add_option("--q0", ga.q0, "base point x,y,z")->required();
  geo->add_option("--lam", ga.lam, "covector u0,v0,w0")->required();
  geo->add_option("--t-max", ga.t_max, "final time")->required();
  geo->add_option("--samples", ga.samples, "uniform output samples");
  geo->add_option("--frame", ga.frame, "cartesian or cylindrical");
  geo->callback([&] { run_void([&] { cmd_geodesic(ctx, ga); }); });

  // cut-time
  std::string q0s, lams;
  double ct_tmax = 1000.0;
  auto* cut = app.add_subcommand("cut-time", "cut time and cut point of one geodesic");
  cut->add_option("--q0", q0s)->required();
  cut->add_option("--lam", lams)->required();
  cut->add_option("--t-max", ct_tmax, "search horizon for the angular-sweep candidate");
  cut->callback([&] { run_void([&] { cmd_cut_time(ctx, q0s, lams, ct_tmax); }); });

  // distance
  std::string from, to;
  std::optional<double> c_v;
  int pairs = 100;
  auto* dst = app.add_subcommand("distance", "exact distance or ball-box bounds");
  dst->add_option("--from", from)->required();
  dst->add_option("--to", to)->required();
  dst->add_option("--c-v", c_v, "ball-box constant; calibrated when omitted");
  dst->add_option("--calibration-pairs", pairs);
  dst->callback([&] { run_void([&] { cmd_distance(ctx, from, to, c_v, pairs); }); });

  // ball
  std::string center, mesh;
  double radius = 1.0;
  int samples = 200, angles = 64;
  auto* ball = app.add_subcommand("ball", "boundary of the metric ball around an axis point");
  ball->add_option("--center", center)->required();
  ball->add_option("--radius", radius)->required();
  ball->add_option("--samples", samples);
  ball->add_option("--mesh", mesh, "also write the surface of revolution as i,j,x,y,z");
  ball->add_option("--angles", angles, "angular resolution of the mesh");
  ball->callback([&] { run_void([&] { cmd_ball(ctx, center, radius, samples, mesh, angles); }); });

  // period
  double w0 = 0.0, energy = 0.5;
  bool crosscheck = false;
  auto* per = app.add_subcommand("period", "turning point and return time from the axis");
  per->add_option("--w0", w0)->required();
  per->add_option("--energy", energy, "E, with 2E = 1 for unit speed");
  per->add_flag("--crosscheck", crosscheck, "also integrate to the first return");
  per->callback([&] { run_void([&] { cmd_period(ctx, w0, energy, crosscheck); }); });

  // conjugate
  std::optional<double> cj_tmax;
  bool experimental = false;
  int grid = 200;
  auto* conj = app.add_subcommand("conjugate", "conjugate times along one geodesic");
  conj->add_option("--q0", q0s)->required();
  conj->add_option("--lam", lams)->required();
  conj->add_option("--t-max", cj_tmax);
  conj->add_flag("--experimental", experimental, "sign-change search, never certified");
  conj->add_option("--grid", grid);
  conj->callback([&] {
    run_void([&] { cmd_conjugate(ctx, q0s, lams, cj_tmax, experimental, grid); });
  });

  // verify
  auto* ver = app.add_subcommand("verify", "invariant checks; exit 1 on any failure");
  ver->callback([&] { action = [&] { return cmd_verify(ctx, profile_opt->count() == 0); }; });

  // fan
  double fan_w0 = 0.5;
  int geodesics = 16, times = 101;
  auto* fan = app.add_subcommand("fan", "geodesics sharing w0 up to their common cut point");
  fan->add_option("--q0", q0s)->required();
  fan->add_option("--w0", fan_w0)->required();
  fan->add_option("--geodesics", geodesics);
  fan->add_option("--times", times);
  fan->callback([&] { run_void([&] { cmd_fan(ctx, q0s, fan_w0, geodesics, times); }); });

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    print_error(err, "usage", e.what());
    return 2;
  }

  try {
    ctx.profile = Profile::parse(profile_text);
    if (const char* env = std::getenv("GRUSHIN_TOL")) {
      char* end = nullptr;
      double v = std::strtod(env, &end);
      if (end == env || *end != '\0') throw InputError("GRUSHIN_TOL is not a number");
      ctx.dyn.ode.rtol = positive_tolerance(v, "GRUSHIN_TOL");
    }
    if (tol.rtol) ctx.dyn.ode.rtol = *tol.rtol;
    if (tol.atol) ctx.dyn.ode.atol = *tol.atol;
    if (tol.drift_tol) ctx.dyn.drift_tol = *tol.drift_tol;
    const bool table_cmd = geo->parsed() || ball->parsed() || fan->parsed() || ver->parsed();
    ctx.format = format.empty() ? (table_cmd ? "csv" : "json") : format;
    std::ofstream file;
    if (!output.empty()) {
      file.open(output);
      if (!file) throw InputError("cannot open output " + output);
      ctx.out = &file;
    } else {
      ctx.out = &out;
    }
    return action();
  } catch (const InputError& e) {
    print_error(err, "input", e.what());
    return 2;
  } catch (const NumericalError& e) {
    print_error(err, "numerical", e.what(), e.diagnostics());
    return 3;
  } catch (const std::exception& e) {
    print_error(err, "numerical", e.what());
    return 3;
  }
}

}  // namespace

std::array<double, 3> parse_triple(std::string_view text, std::string_view flag) {
  std::array<double, 3> v{};
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    std::size_t comma = text.find(',', pos);
    bool last = i == 2;
    if ((comma == std::string_view::npos) != last)
      throw InputError("expected three comma-separated numbers for " + std::string(flag));
    std::string item(text.substr(pos, last ? std::string_view::npos : comma - pos));
    char* end = nullptr;
    v[i] = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0' || !std::isfinite(v[i]))
      throw InputError("bad number '" + item + "' in " + std::string(flag));
    pos = comma + 1;
  }
  return v;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Tolerances tol;
  auto it = std::find_if(args.begin(), args.end(),
                         [](const std::string& a) { return a.rfind("--config", 0) == 0; });
  if (it == args.end()) return dispatch(args, tol, out, err);
  try {
    std::string path;
    if (*it == "--config") {
      if (it + 1 == args.end()) throw InputError("--config needs a path");
      path = *(it + 1);
    } else if (it->rfind("--config=", 0) == 0) {
      path = it->substr(9);
    } else {
      return dispatch(args, tol, out, err);
    }
    if (args.size() != (*it == "--config" ? 2u : 1u))
      throw InputError("--config cannot be combined with other arguments");
    return dispatch(load_config(path, tol), tol, out, err);
  } catch (const InputError& e) {
    print_error(err, "input", e.what());
    return 2;
  }
}

}  // namespace grushin::cli
