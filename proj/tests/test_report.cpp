#include <doctest.h>

#include <cstdio>
#include <fstream>

#include <phi4/report.hpp>

using namespace phi4;

TEST_CASE("seventeen significant digits round-trip")
{
  for (double v : {1.0 / 3.0, 6.2e5, -2.0 * std::exp(-1.0), 1e-300})
    CHECK(std::stod(float17(v)) == v);
}

TEST_CASE("config file parsing and precedence")
{
  const std::string path = "test_config_tmp.conf";
  {
    std::ofstream out(path);
    out << "# comment\n"
        << "[solver]\n"
        << "g = 2.0\n"
        << "lambda0 = 50   # inline comment\n"
        << "l_max = 2\n"
        << "\n"
        << "[lemmas]\n"
        << "l_max = 12\n";
  }
  auto cfg = RunConfig::from_file(path);
  CHECK(cfg.get_double("solver.g", 1.0) == 2.0);
  CHECK(cfg.get_double("solver.lambda0", 100.0) == 50.0);
  CHECK(cfg.get_int("lemmas.l_max", 30) == 12);
  // flag overrides take precedence over file values
  cfg.set("solver.g", "3.5");
  CHECK(cfg.solver_config().g == 3.5);
  CHECK(cfg.solver_config().lambda0 == 50.0);
  CHECK(cfg.solver_config().l_max == 2);
  // fallback for unset keys
  CHECK(cfg.get_double("solver.m", 1.0) == 1.0);
  std::remove(path.c_str());
  CHECK_THROWS_AS(RunConfig::from_file("no-such-file.conf"), domain_error);
}

TEST_CASE("config serialization embeds every resolved value")
{
  RunConfig cfg;
  cfg.set("solver.g", "2");
  cfg.seed = 99;
  const auto j = cfg.to_json();
  CHECK(j["solver.g"] == "2");
  CHECK(j["seed"] == 99);
}

TEST_CASE("table CSV emission")
{
  AmplitudeTable t;
  t.l = 1;
  t.n = 1;
  t.family = "antipodal-pair";
  t.axes = {{0.0, 1.0}};
  t.lambda_nodes = {0.0, 2.0};
  t.values = {1.0, 2.0, 3.0, 4.0};
  t.rhs_values = t.values;
  SolverConfig sc = SolverConfig::defaults();
  const std::string path = "test_table_tmp.csv";
  write_table_csv(t, sc, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "p,lambda,value");
  std::getline(in, line);
  CHECK(line == "0,0,1");
  std::remove(path.c_str());
}
