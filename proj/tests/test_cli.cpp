#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "app.hpp"
#include "export.hpp"
#include "grushin/singular_synthesis.hpp"

using namespace grushin::cli;
using std::numbers::pi;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<double>> parse_csv(const std::string& text, std::vector<std::string>* header = nullptr) {
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  if (header) {
    std::istringstream hs(line);
    std::string c;
    while (std::getline(hs, c, ',')) header->push_back(c);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    std::vector<double> row;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) row.push_back(std::strtod(c.c_str(), nullptr));
    rows.push_back(row);
  }
  return rows;
}

void check_error_line(const Result& r, const char* kind) {
  CHECK(r.out.empty());
  REQUIRE(!r.err.empty());
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  auto j = json::parse(r.err);
  CHECK(j["error"] == kind);
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("grushin_cli_test_" + name)).string();
}

std::string write_temp(const std::string& name, const std::string& body) {
  std::string path = temp_path(name + ".json");
  std::ofstream(path) << body;
  return path;
}

}  // namespace

TEST_CASE("parse_triple") {
  auto v = parse_triple("1,-2.5,3e-1", "--q0");
  CHECK(v[0] == 1.0);
  CHECK(v[1] == -2.5);
  CHECK(v[2] == 0.3);
  CHECK_THROWS(parse_triple("1,0", "--lam"));
  CHECK_THROWS(parse_triple("1,0,0,0", "--lam"));
  CHECK_THROWS(parse_triple("1,x,0", "--lam"));
  CHECK_THROWS(parse_triple("1,,0", "--lam"));
}

TEST_CASE("geodesic export keeps K constant") {
  auto r = call({"geodesic", "--profile", "monomial:alpha=1", "--q0", "1,0,0", "--lam", "0,1,0.5",
                 "--t-max", "6.2832"});
  REQUIRE(r.code == 0);
  std::vector<std::string> header;
  auto rows = parse_csv(r.out, &header);
  CHECK(header == std::vector<std::string>{"t", "x", "y", "z", "u", "v", "w0", "H", "K"});
  CHECK(rows.size() == 201);
  for (const auto& row : rows) CHECK(std::abs(row[8] - 1.0) < 1e-9);
}

TEST_CASE("geodesic from the axis returns at the period") {
  const double T = grushin::period(grushin::Profile::monomial(2.0), 0.5, 1.0).T;
  std::ostringstream ts;
  ts.precision(17);
  ts << T;
  auto r = call({"geodesic", "--profile", "monomial:alpha=2", "--q0", "0,0,0", "--lam", "1,0,1", "--t-max",
                 ts.str(), "--samples", "11"});
  REQUIRE(r.code == 0);
  auto rows = parse_csv(r.out);
  CHECK(std::hypot(rows.back()[1], rows.back()[2]) < 1e-8);
}

TEST_CASE("cylindrical export") {
  auto r = call({"geodesic", "--profile", "monomial:alpha=2", "--q0", "1,0,0", "--lam", "0.3,0.5,0.6",
                 "--t-max", "3", "--frame", "cylindrical", "--samples", "5"});
  REQUIRE(r.code == 0);
  std::vector<std::string> header;
  auto rows = parse_csv(r.out, &header);
  CHECK(header == std::vector<std::string>{"t", "r", "theta", "z", "rdot"});
  CHECK(rows[0][4] == doctest::Approx(0.3));
}

TEST_CASE("usage errors exit 2") {
  check_error_line(call({"geodesic", "--q0", "1,0,0", "--lam", "1,0", "--t-max", "1"}), "input");
  check_error_line(call({"geodesic", "--q0", "1,0,0"}), "usage");
  check_error_line(call({"nonsense"}), "usage");
  check_error_line(call({"period", "--w0", "1", "--profile", "cubic"}), "input");
  CHECK(call({"geodesic", "--q0", "1,0,0", "--lam", "1,0", "--t-max", "1"}).code == 2);
  CHECK(call({"conjugate", "--profile", "monomial:alpha=2", "--q0", "1,0,0", "--lam", "0,0.3,1"}).code == 2);
}

TEST_CASE("cut-time") {
  auto a = call({"cut-time", "--q0", "0,0,0", "--lam", "1,0,1"});
  REQUIRE(a.code == 0);
  auto ja = json::parse(a.out);
  CHECK(ja["t_cut"].get<double>() == doctest::Approx(pi));
  CHECK(ja["cut_point"][2].get<double>() == doctest::Approx(pi / 2));
  CHECK(ja["certified"] == true);

  auto b = call({"cut-time", "--q0", "1,0,0", "--lam", "0.8660254037844386,0,0.5"});
  REQUIRE(b.code == 0);
  auto jb = json::parse(b.out);
  CHECK(jb["t_cut"].get<double>() == doctest::Approx(2 * pi));
  CHECK(jb["certified"] == true);

  auto c = call({"cut-time", "--profile", "monomial:alpha=2", "--q0", "1,0,0", "--lam", "0.3,0.8,0.5"});
  REQUIRE(c.code == 0);
  auto jc = json::parse(c.out);
  CHECK(jc["certified"] == false);
  CHECK(jc["bound"] == "upper");
  CHECK(jc["t_cut"].is_number());

  auto d = call({"cut-time", "--profile", "monomial:alpha=2", "--q0", "1,0,0", "--lam", "0.3,0,0.5"});
  auto jd = json::parse(d.out);
  CHECK(jd["bound"] == "lower");
  CHECK(jd["certified"] == false);
}

TEST_CASE("distance") {
  auto r = call({"distance", "--profile", "monomial:alpha=1", "--from", "1,0,0", "--to", "-1,0,1.5708"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["value"].get<double>() == doctest::Approx(pi).epsilon(1e-5));
  for (const char* k : {"value", "lower", "upper", "witness", "tol"}) CHECK(j.contains(k));
  auto bb = json::parse(call({"distance", "--profile", "monomial:alpha=2", "--from", "1,0,0", "--to", "0.5,0.3,1"}).out);
  CHECK(bb["value"].is_null());
  CHECK(bb["lower"].get<double>() <= bb["upper"].get<double>());
}

TEST_CASE("ball export") {
  auto r = call({"ball", "--profile", "monolog:alpha=1,beta=2", "--center", "0,0,0", "--radius", "1",
                 "--samples", "50", "--mesh", temp_path("mesh.csv"), "--angles", "8"});
  REQUIRE(r.code == 0);
  std::vector<std::string> header;
  auto rows = parse_csv(r.out, &header);
  CHECK(header == std::vector<std::string>{"w0", "t", "rho", "z"});
  CHECK(rows.size() == 99);  // the w0 = 0 point is shared
  CHECK(std::abs(rows.front()[2]) < 1e-12);
  CHECK(std::abs(rows.back()[2]) < 1e-12);
  std::ifstream mesh(temp_path("mesh.csv"));
  std::stringstream ms;
  ms << mesh.rdbuf();
  std::vector<std::string> mh;
  auto mrows = parse_csv(ms.str(), &mh);
  CHECK(mh == std::vector<std::string>{"i", "j", "x", "y", "z"});
  CHECK(mrows.size() == rows.size() * 8);
  check_error_line(call({"ball", "--center", "1,0,0", "--radius", "1"}), "input");
}

TEST_CASE("period and conjugate") {
  auto p = json::parse(call({"period", "--w0", "2", "--crosscheck"}).out);
  CHECK(p["T"].get<double>() == doctest::Approx(pi / 2));
  CHECK(p["T_ode"].get<double>() == doctest::Approx(pi / 2).epsilon(1e-8));
  auto c = json::parse(call({"conjugate", "--q0", "1,0,0", "--lam", "0,0.6,0.8"}).out);
  REQUIRE(c.size() == 1);
  CHECK(c[0]["t_lo"].get<double>() == doctest::Approx(pi / 0.8));
  CHECK(c[0]["certified"] == true);
  auto e = json::parse(call({"conjugate", "--profile", "monomial:alpha=2", "--q0", "1,0,0", "--lam", "0,0.3,1",
                             "--experimental"})
                           .out);
  REQUIRE(!e.empty());
  for (const auto& s : e) {
    CHECK(s["certified"] == false);
    CHECK(s["t_lo"].get<double>() <= s["t_hi"].get<double>());
  }
}

TEST_CASE("fan export") {
  auto r = call({"fan", "--q0", "1,0,0", "--w0", "0.5", "--geodesics", "4", "--times", "5"});
  REQUIRE(r.code == 0);
  std::vector<std::string> header;
  auto rows = parse_csv(r.out, &header);
  CHECK(header == std::vector<std::string>{"w0", "phi", "t", "x", "y", "z"});
  CHECK(rows.size() == 20);
  CHECK(call({"fan", "--profile", "monomial:alpha=2", "--q0", "1,0,0", "--w0", "0.5"}).code == 2);
}

TEST_CASE("verify") {
  auto ok = call({"verify", "--profile", "monomial:alpha=2"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("fail") == std::string::npos);
  auto bad = call({"verify", "--profile", "monomial:alpha=0.5"});
  CHECK(bad.code == 1);
  CHECK(bad.out.find(",axioms,fail,") != std::string::npos);
}

TEST_CASE("determinism and JSON round trip") {
  std::vector<std::string> args{"geodesic", "--profile", "monomial:alpha=3", "--q0", "0.3,0.2,0", "--lam",
                                "0.1,0.5,0.9", "--t-max", "4", "--format", "json"};
  auto a = call(args), b = call(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  auto j = json::parse(a.out);
  auto t = table_from_json(j, {"t", "x", "y", "z", "u", "v", "w0", "H", "K"});
  CHECK(table_to_json(t).dump() + "\n" == a.out);
  Table inf{{"a"}, {{std::numeric_limits<double>::infinity()}}};
  CHECK(table_to_json(inf).dump() == "[{\"a\":null}]");
  CHECK(std::isinf(table_from_json(table_to_json(inf), {"a"}).rows[0][0]));
  CHECK(csv_number(0.1) == "0.10000000000000001");
}

TEST_CASE("config files") {
  auto good = write_temp("good", R"({"command": "period", "profile": "monomial:alpha=2",
                                      "args": {"w0": 1.5, "crosscheck": true}})");
  auto viaconfig = call({"--config", good});
  auto viaflags = call({"period", "--profile", "monomial:alpha=2", "--w0", "1.5", "--crosscheck"});
  REQUIRE(viaconfig.code == 0);
  CHECK(viaconfig.out == viaflags.out);
  auto unknown = write_temp("unknown", R"({"command": "period", "args": {"w0": 1}, "colour": "red"})");
  check_error_line(call({"--config", unknown}), "input");
  auto negative = write_temp("negative", R"({"command": "period", "args": {"w0": 1}, "tolerances": {"rtol": -1}})");
  check_error_line(call({"--config", negative}), "input");
  auto badarg = write_temp("badarg", R"({"command": "period", "args": {"w0": 1, "bogus": 2}})");
  CHECK(call({"--config", badarg}).code == 2);
  auto strict = write_temp("strict", R"({"command": "geodesic", "args": {"q0": [1,0,0], "lam": [0.3,0.5,0.6],
                                        "t-max": 50}, "tolerances": {"drift_tol": 1e-30}})");
  auto num = call({"--config", strict});
  CHECK(num.code == 3);
  check_error_line(num, "numerical");
}

TEST_CASE("GRUSHIN_TOL") {
  setenv("GRUSHIN_TOL", "abc", 1);
  CHECK(call({"period", "--w0", "1"}).code == 2);
  setenv("GRUSHIN_TOL", "-1e-9", 1);
  CHECK(call({"period", "--w0", "1"}).code == 2);
  setenv("GRUSHIN_TOL", "1e-8", 1);
  auto r = call({"geodesic", "--q0", "1,0,0", "--lam", "0,1,0.5", "--t-max", "3", "--samples", "3"});
  CHECK(r.code == 0);
  unsetenv("GRUSHIN_TOL");
}
