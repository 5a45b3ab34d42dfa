#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "cli_support.hpp"

using namespace mcpsim_cli;

TEST_CASE("config text: key=value and header forms") {
  const auto kv = parse_config_text("beta = 4\n# c=6\n\nnot a setting\nalpha=8\n");
  REQUIRE(kv.size() == 3);
  CHECK(kv[0] == std::pair<std::string, std::string>{"beta", "4"});
  CHECK(kv[1] == std::pair<std::string, std::string>{"c", "6"});
  CHECK(kv[2].first == "alpha");

  const auto csv = parse_config_text("# mcpsim 0.1.0\n# command=sweep\n# seed=5\nt,k\n1,2\n# x=1\n");
  REQUIRE(csv.size() == 2);
  CHECK(csv[0].first == "command");
  CHECK(csv[1].second == "5");

  const auto js = parse_config_text(
      R"({"header": {"tool": "mcpsim", "command": "couple", "config": {"seed": "7", "z": 4}}, "report": {}})");
  REQUIRE(js.size() == 3);
  CHECK(js[0] == std::pair<std::string, std::string>{"command", "couple"});
}

TEST_CASE("header round trip through merge_config_args") {
  ExperimentConfig cfg("dominance");
  cfg.set("lambda", 2.0434988276957707);
  cfg.set_int("replicas", 1000);
  cfg.set("lambda", 0.1);  // overwrite keeps position
  CHECK(cfg.entries().size() == 2);
  const char* path = "cli_support_header.tmp";
  {
    std::ofstream f(path);
    f << cfg.csv_header() << "t,k\n";
  }
  const auto args = merge_config_args({"mcpsim", "--config", path, "dominance", "--z", "3"});
  const std::vector<std::string> want{"mcpsim", "dominance", "--lambda=0.10000000000000001",
                                      "--replicas=1000", "--z", "3"};
  CHECK(args == want);
  CHECK_THROWS_AS(merge_config_args({"mcpsim", "--config", path, "couple"}), std::runtime_error);
  // The recorded command is used when none is given.
  CHECK(merge_config_args({"mcpsim", "--config=" + std::string(path)})[1] == "dominance");
  std::remove(path);
  CHECK_THROWS_AS(merge_config_args({"mcpsim", "--config", "/nonexistent/x"}), std::runtime_error);
}

TEST_CASE("exact formatting round-trips doubles") {
  for (double v : {0.1, 1.0 / 3.0, 2.0434988276957707, 1e-300, 6.02e23}) {
    CHECK(std::stod(exact(v)) == v);
  }
  CHECK(csv_number(1.0 / 3.0) == "0.333333333333");
}

TEST_CASE("lambda_c presets") {
  CHECK(resolve_lambda_c("lower", 1) == 1.0);
  CHECK(resolve_lambda_c("upper", 1) == 2.0);
  CHECK(resolve_lambda_c("lower", 2) == doctest::Approx(1.0 / 3.0));
  CHECK(resolve_lambda_c("literature", 1) == doctest::Approx(1.6494));
  CHECK(resolve_lambda_c("literature", 2) > resolve_lambda_c("lower", 2));
  CHECK(resolve_lambda_c("literature", 2) < resolve_lambda_c("upper", 2));
  CHECK(resolve_lambda_c("1.25", 3) == 1.25);
  CHECK_THROWS_AS(resolve_lambda_c("literature", 4), std::invalid_argument);
  CHECK_THROWS_AS(resolve_lambda_c("-1", 1), std::invalid_argument);
  CHECK_THROWS_AS(resolve_lambda_c("abc", 1), std::invalid_argument);
}

TEST_CASE("axes") {
  const Axis a = parse_axis("c:1:10:4");
  CHECK(a.name == "c");
  CHECK(a.values() == std::vector<double>{1, 4, 7, 10});
  const Axis l = parse_axis("alpha:1:100:3:log");
  CHECK(l.log);
  CHECK(l.values()[1] == doctest::Approx(10.0));
  CHECK_THROWS_AS(parse_axis("c:1:10"), std::invalid_argument);
  CHECK_THROWS_AS(parse_axis("c:1:10:x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_axis("c:1:10:3:cubic"), std::invalid_argument);
}

TEST_CASE("sweep grids") {
  SweepGrid g;
  g.axes = {parse_axis("c:1:20:2")};
  CHECK(run_sweep(g).size() == 2);

  g.axes = {parse_axis("c:0.5:30:60")};
  const auto rows = run_sweep(g);
  bool seen_true = false;
  for (const auto& r : rows) {
    if (seen_true) CHECK(r.sufficient);
    seen_true = seen_true || r.sufficient;
    CHECK(r.c_star.has_value());
  }
  CHECK(seen_true);
  CHECK_FALSE(rows.front().sufficient);

  g.axes = {parse_axis("alpha:0.1:50:40:log")};
  const auto ar = run_sweep(g);
  for (std::size_t i = 1; i < ar.size(); ++i) CHECK(ar[i].lambda_bar > ar[i - 1].lambda_bar);
  CHECK_FALSE(ar.front().c_star.has_value());

  g.axes = {parse_axis("c:1:2:2"), parse_axis("beta:1:2:3")};
  CHECK(run_sweep(g).size() == 6);
  CHECK(sweep_to_csv(run_sweep(g)).rfind("beta,c,alpha,dim,lambda_bar,sufficient,c_star\n", 0) == 0);

  g.axes = {parse_axis("c:1:2:2"), parse_axis("c:1:2:2")};
  CHECK_THROWS_AS(run_sweep(g), std::invalid_argument);
  g.axes = {parse_axis("c:1:2:1")};
  CHECK_THROWS_AS(run_sweep(g), std::invalid_argument);
  g.axes = {parse_axis("gamma:1:2:2")};
  CHECK_THROWS_AS(run_sweep(g), std::invalid_argument);
  g.axes = {parse_axis("c:0:2:2")};
  CHECK_THROWS_AS(run_sweep(g), std::invalid_argument);
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(MCPSIM_OK) == 0);
  CHECK(exit_code_for(MCPSIM_ERR_DOMAIN) == kExitDomain);
  CHECK(exit_code_for(MCPSIM_ERR_RESOURCE) == kExitResource);
  CHECK(kExitViolation != kExitDomain);
  CHECK(kExitViolation != kExitResource);
}
