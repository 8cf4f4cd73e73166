#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rfg/experiments.hpp"
#include "rfg/group_io.hpp"
#include "test_util.hpp"

using namespace rfg;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out;
};

// Runs the CLI with stderr discarded and returns its exit code and stdout.
Run cli(const std::string& args) {
  std::string cmd = std::string(RFG_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

json bs12_json() { return json::parse(slurp(catalog_path("bs12.json"))); }

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "rfg_cli_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("catalog files parse and validate") {
    for (const char* name : {"bs12", "z2_fibonacci", "heisenberg", "z2_trivial", "heis_x_z2A"}) {
      MGroup G = parse_group_file(catalog_path(std::string(name) + ".json"));
      CHECK(G.description().name == name);
      json back = group_to_json(G.description());
      CHECK(parse_group_json(back).dim_k == G.dim());
    }
  }

  TEST_CASE("malformed group files are rejected") {
    json j = bs12_json();
    j["actions"] = json::array({json::array({json::array({"1/0"})})});
    CHECK_THROWS_AS(parse_group_json(j), SchemaError);

    j = bs12_json();
    j.erase("dim_k");
    CHECK_THROWS_AS(parse_group_json(j), SchemaError);

    j = bs12_json();
    j["relators"] = json::array({json::array({1, 7})});
    CHECK_THROWS_AS(MGroup(parse_group_json(j)), Error);

    CHECK_THROWS_AS(parse_k_coords("1,2", 3), SchemaError);
    CHECK(parse_k_coords("0,-1/2,3", 3) == test::vec({"0", "-1/2", "3"}));
    CHECK(parse_int_list("2,-3") == std::vector<i64>{2, -3});
  }

  TEST_CASE("element formatting") {
    MGroup G = test::catalog("bs12");
    GroupElement g = G.from_k(test::vec({"3/4"}));
    g.h[0] = -2;
    CHECK(format_element(g, false) == "3/4;-2");
  }

  TEST_CASE("growth fits on synthetic data") {
    std::vector<double> r, quad, cube_log, expo;
    for (int x = 1; x <= 12; ++x) {
      r.push_back(x);
      quad.push_back(7.0 * x * x);
      cube_log.push_back(std::pow(std::log(static_cast<double>(x) + 1.0), 3.0) * 4.0);
      expo.push_back(std::exp(0.7 * x));
    }
    auto f = fit_exponent(r, quad, GrowthModel::Polynomial);
    CHECK(f.exponent >= 1.9);
    CHECK(f.exponent <= 2.1);
    CHECK(f.points == 10);
    CHECK(f.residual < 1e-9);
    CHECK(fit_exponent(r, expo, GrowthModel::Exponential).exponent == doctest::Approx(0.7));
    CHECK(fit_exponent(r, cube_log, GrowthModel::Polylog).exponent > 2.0);

    DeclaredBound two{"polynomial", 2.0};
    CHECK(fit_exponent(r, quad, GrowthModel::Polynomial, two).verdict == "consistent");
    DeclaredBound one{"polynomial", 1.0};
    CHECK(fit_exponent(r, quad, GrowthModel::Polynomial, one).verdict == "violates-upper");
    CHECK(fit_exponent(r, quad, GrowthModel::Polynomial).verdict == "inconclusive");

    CHECK_THROWS_AS(fit_exponent({1, 2, 3, 4, 5}, {1, 4, 9, 16, 25}, GrowthModel::Polynomial), PreconditionError);
    CHECK_THROWS(parse_growth_model("linear"));
    CHECK(to_string(parse_growth_model("polylog")) == "polylog");
  }

  TEST_CASE("cli ball sizes") {
    auto run = cli("ball --group heisenberg --rmax 3");
    REQUIRE(run.code == 0);
    CHECK(run.out.find("r,ball_size,k_size\n") == 0);
    CHECK(run.out.find("\n1,7,") != std::string::npos);
    CHECK(run.out.find("\n3,83,") != std::string::npos);
  }

  TEST_CASE("cli separate emits a certificate") {
    auto run = cli("separate --group z2_fibonacci --element 1,0 --h 0");
    REQUIRE(run.code == 0);
    json j = json::parse(run.out);
    CHECK(j["order"] == 55);
    CHECK(j["prime"] == 11);
  }

  TEST_CASE("cli writes csv and manifest") {
    auto out = scratch("bs_rf.csv");
    auto run = cli("rf-curve --group bs12 --rmax 3 --bound 100 --fit polynomial --out " + out.string());
    REQUIRE(run.code == 0);
    std::string csv = slurp(out);
    CHECK(csv.find("r,rf_exact,rf_upper,witness_norm,witness_coords,bound_status\n") == 0);
    CHECK(csv.find("\n1,6,") != std::string::npos);
    json m = json::parse(slurp(out.string() + ".manifest.json"));
    CHECK(m["status"] == "ok");
    CHECK(m["config"]["rmax"] == 3);
    CHECK(m["results"]["family"] == "baumslag_solitar");
    CHECK(m.contains("versions"));
    CHECK(m.contains("timings_ms"));
    CHECK(m["fit"]["model"] == "polynomial");
  }

  TEST_CASE("cli delta and witness tables") {
    auto d = cli("delta --group z2_fibonacci --primes 3");
    REQUIRE(d.code == 0);
    CHECK(d.out == "p,delta_p,split_ok,order_checks\n11,1,true,pass:5\n19,1,true,pass:9\n29,1,true,pass:7\n");
    auto w = cli("witness-curve --group bs12 --element 1 --rmax 6 --bound 100");
    REQUIRE(w.code == 0);
    CHECK(w.out.find("\n6,60,21,exact\n") != std::string::npos);
  }

  TEST_CASE("cli error codes") {
    auto out = scratch("bad.csv");
    CHECK(cli("ball --group no_such_group --rmax 2").code == 2);
    CHECK(cli("separate --group bs12 --element 0").code == 1);
    CHECK(cli("rf-curve --group heis_x_z2A --rmax 2 --out " + out.string()).code == 5);
    json m = json::parse(slurp(out.string() + ".manifest.json"));
    CHECK(m["status"] == "error");
    CHECK(m["kind"] == "unsupported");
    CHECK(cli("ball --group bs12 --mode fast").code != 0);
  }
}
