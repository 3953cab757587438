#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qmd/config.hpp"

using namespace qmd;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("minimal depolarizing simulate config parses") {
  const std::string text = R"({
    "command": "simulate",
    "seed": 42,
    "n_max": 5,
    "schedule": {"kind": "periodic", "channels": [
      {"kind": "depolarizing", "dim": 2, "p": 0.5}
    ]}
  })";
  RunConfig cfg = parse_config(text);
  CHECK(cfg.command == "simulate");
  CHECK(cfg.seed == 42);
  CHECK(cfg.n_max == 5);
  REQUIRE(cfg.schedule.has_value());
  CHECK(cfg.schedule->dim() == 2);
  CHECK(cfg.schedule->kind() == ProcessSchedule::Kind::periodic);
}

TEST_CASE("stochastic row summing to 0.9 reports its JSON pointer") {
  const std::string text = R"({
    "command": "classical",
    "n_max": 1,
    "schedule": {"matrices": [
      {"rows": [[0.5, 0.5], [0.4, 0.5]]},
      {"rows": [[1.0, 0.0], [0.0, 1.0]]}
    ]}
  })";
  try {
    parse_config(text);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.path == "/schedule/matrices/0/rows/1");
  }
}

TEST_CASE("presets expand to the worked examples") {
  RunConfig exp1 = parse_config(R"({
    "command": "simulate", "seed": 0, "n_max": 3,
    "schedule": {"preset": "example-exp1"}
  })");
  // channel 0 embeds the stochastic matrix with rows (1, 0)
  Matrix rho = Matrix::Zero(2, 2);
  rho(1, 1) = 1.0;
  Matrix out = exp1.schedule->channel(0).apply(rho);
  CHECK(std::abs(out(0, 0).real() - 1.0) < 1e-12);
  CHECK(std::abs(out(1, 1)) < 1e-12);

  RunConfig osc = parse_config(R"({
    "command": "simulate", "seed": 0, "n_max": 3,
    "schedule": {"preset": "example-oscillation"}
  })");
  Matrix o0 = osc.schedule->channel(0).apply(rho);
  CHECK(std::abs(o0(0, 0).real() - 1.0) < 1e-12);
  Matrix o1 = osc.schedule->channel(1).apply(rho);
  CHECK(std::abs(o1(1, 1).real() - 1.0) < 1e-12);
}

TEST_CASE("validation failures carry paths") {
  // unknown field
  CHECK_THROWS_AS(parse_config(R"({"command": "simulate", "seed": 1,
    "n_max": 2, "bogus": 1,
    "schedule": {"preset": "example-exp1"}})"),
                  ConfigError);
  // missing seed on a stochastic command
  try {
    parse_config(R"({"command": "simulate", "n_max": 2,
      "schedule": {"preset": "example-exp1"}})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.path == "/seed");
  }
  // non-Hermitian observable
  const std::string mps = R"({
    "command": "mps", "n_max": 2, "bond_dim": 1, "phys_dim": 1,
    "sites": [[[[[0.0, 1.0]]]], [[[[1.0, 0.0]]]]],
    "observable": {"window": [1, 1], "matrix": [[[0.0, 1.0]]]}
  })";
  try {
    parse_config(mps);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.path == "/observable/matrix");
  }
  // bad n_max
  CHECK_THROWS_AS(parse_config(R"({"command": "simulate", "seed": 1,
    "n_max": 0, "schedule": {"preset": "example-exp1"}})"),
                  ConfigError);
  // invalid JSON text
  CHECK_THROWS_AS(parse_config("not json"), ConfigError);
}

TEST_CASE("mps config with a random train runs end to end") {
  const std::string text = R"({
    "command": "mps", "n_max": 6, "bond_dim": 2, "phys_dim": 4,
    "sites": {"random": {"seed": 3, "n": 6, "beta": 0.3}},
    "output": "/tmp/qmd_cfg_mps.csv",
    "observable": {"window": [1, 1],
                   "matrix": [[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0],
                               [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
                              [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0], [0.0, 0.0],
                               [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
                              [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0],
                               [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
                              [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0],
                               [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
                              [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0],
                               [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
                              [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0],
                               [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
                              [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0],
                               [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
                              [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0],
                               [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]]}
  })";
  RunConfig cfg = parse_config(text);
  REQUIRE(cfg.train.has_value());
  CHECK(cfg.train->length() == 6);
  CHECK(cfg.train->phys_dim(1) == 8);  // 4 Haar tensors + 4 noise tensors
  CHECK(run(cfg) == 0);  // stdout sink
}

TEST_CASE("run writes byte-identical reports for identical configs") {
  const std::string out1 = "/tmp/qmd_cfg_a.json";
  const std::string out2 = "/tmp/qmd_cfg_b.json";
  const std::string text = std::string(R"({
    "command": "analyze-channel",
    "channel": {"kind": "depolarizing", "dim": 2, "p": 0.3},
    "epsilon": 0.01,
    "output": ")");
  RunConfig a = parse_config(text + out1 + "\"}");
  RunConfig b = parse_config(text + out2 + "\"}");
  REQUIRE(run(a) == 0);
  REQUIRE(run(b) == 0);
  const std::string ra = slurp(out1), rb = slurp(out2);
  CHECK(!ra.empty());
  CHECK(ra == rb);
  CHECK(ra.find("\"trace_lower_bound\"") != std::string::npos);
  std::remove(out1.c_str());
  std::remove(out2.c_str());
}

TEST_CASE("run_from_file: missing file is a validation error") {
  CHECK(run_from_file("/nonexistent/qmd.json") == 1);
}
