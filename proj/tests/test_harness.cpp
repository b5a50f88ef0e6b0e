#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "latnc/harness.hpp"

using namespace latnc;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<ResultRow> strip_wall(std::vector<ResultRow> rows) {
  for (auto& r : rows) r.wall_seconds = 0.0;
  return rows;
}

}  // namespace

TEST_CASE("parse_config basics") {
  const auto c = parse_config(R"({"scheme":"shaping-gain-1d","L":4})");
  CHECK(c.scheme == "shaping-gain-1d");
  CHECK(c.l == 4);
  CHECK(c.bp_iterations == 100);
  CHECK(c.step == doctest::Approx(1.0 / 128.0));
  CHECK(c.span == doctest::Approx(8.0));
  CHECK(c.ra_iterations == 20);
  CHECK(c.m_width == 64);

  CHECK_THROWS_AS(parse_config(R"({"L":4})"), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"scheme":"nope"})"), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"scheme":"ldlc-p2p","bogus":1})"),
                  ValidationError);
  CHECK_THROWS_AS(parse_config("{not json"), ParseError);
  CHECK_THROWS_AS(
      parse_config(R"({"scheme":"ldlc-p2p","snr_sweep_db":[2.0,1.0]})"),
      ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"scheme":"ldlc-p2p","trials":0})"),
                  ValidationError);
}

TEST_CASE("preset configs parse and round-trip") {
  for (const std::string name :
       {"fig10_11_ldlc", "fig12_qpsk", "fig14_16qam"}) {
    const std::string text =
        slurp(std::string(LATNC_SOURCE_DIR) + "/presets/" + name + ".json");
    const auto c1 = parse_config(text);
    const std::string ser = serialize_config(c1);
    const auto c2 = parse_config(ser);
    CHECK(serialize_config(c2) == ser);
  }
}

TEST_CASE("run_experiment: shaping gain row") {
  auto config = parse_config(R"({"scheme":"shaping-gain-1d","L":4})");
  const auto rows = run_experiment(config);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].snr_db == doctest::Approx(0.7918).epsilon(1e-3));
  CHECK(rows[0].error_rate == 0.0);
}

TEST_CASE("run_experiment: lattice identity reports zero mismatches") {
  auto config = parse_config(
      R"({"scheme":"lattice-identity","snr_sweep_db":[6.0,12.0],"trials":300})");
  const auto rows = run_experiment(config);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    CHECK(r.errors == 0);
    CHECK(r.error_rate == 0.0);
    CHECK(r.trials == 300);
  }
}

TEST_CASE("run_experiment: noiseless BICM rd-wnc decodes exactly") {
  auto config = parse_config(R"({
    "scheme": "bicm-rdwnc", "constellation": "qpsk",
    "q_a": 2, "q_b": 4, "info_bits_a": 200,
    "snr_sweep_db": [60.0], "trials": 5, "seed": 3})");
  const auto rows = run_experiment(config);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.error_rate == 0.0);
    CHECK(r.rate_bits_per_use == doctest::Approx(r.user == "A" ? 1.0 : 0.5));
  }
}

TEST_CASE("baseline pairing emits matched p2p rows") {
  auto config = parse_config(R"({
    "scheme": "bicm-rdwnc", "baseline": true, "info_bits_a": 200,
    "snr_sweep_db": [4.0], "trials": 20, "seed": 5})");
  const auto rows = run_experiment(config);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    if (r.scheme != "bicm-rdwnc") continue;
    bool paired = false;
    for (const auto& p : rows) {
      if (p.scheme == "bicm-p2p" && p.user == r.user && p.snr_db == r.snr_db &&
          p.rate_bits_per_use == r.rate_bits_per_use) {
        paired = true;
      }
    }
    CHECK(paired);
  }
}

TEST_CASE("CSV and JSON writers") {
  CHECK(results_to_csv({}) ==
        "scheme,user,snr_db,rate_bits_per_use,error_rate,ci95_low,ci95_high,"
        "trials,errors,wall_seconds\n");

  ResultRow r;
  r.scheme = "bicm-p2p";
  r.user = "A";
  r.snr_db = 3.5;
  r.rate_bits_per_use = 1.0;
  r.error_rate = 0.001;
  r.ci95_low = 0.0005;
  r.ci95_high = 0.002;
  r.trials = 100;
  r.errors = 13;
  r.wall_seconds = 1.25;
  const std::string csv = results_to_csv({r});
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);

  const auto back = read_results_csv(csv);
  REQUIRE(back.size() == 1);
  CHECK(back[0] == r);

  const std::string json = results_to_json({r});
  CHECK(json.find("\"scheme\": \"bicm-p2p\"") != std::string::npos);
  CHECK(json.find("\"errors\": 13") != std::string::npos);
}

TEST_CASE("CSV round trip under randomized rows") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int t = 0; t < 1000; ++t) {
    ResultRow r;
    r.scheme = t % 2 ? "ldlc-rdwnc" : "weird,\"scheme\"";
    r.user = t % 3 ? "A" : "B";
    r.snr_db = u(rng);
    r.rate_bits_per_use = u(rng);
    r.error_rate = std::abs(u(rng)) / 100.0;
    r.ci95_low = u(rng);
    r.ci95_high = u(rng);
    r.trials = static_cast<std::int64_t>(rng() % 100000);
    r.errors = static_cast<std::int64_t>(rng() % 1000);
    r.wall_seconds = std::abs(u(rng));
    const auto back = read_results_csv(results_to_csv({r}));
    REQUIRE(back.size() == 1);
    CHECK(back[0] == r);
  }
}

TEST_CASE("experiment output is deterministic apart from wall time") {
  auto config = parse_config(R"({
    "scheme": "bicm-rdwnc", "info_bits_a": 200,
    "snr_sweep_db": [3.0], "trials": 30, "seed": 9})");
  const auto a = strip_wall(run_experiment(config));
  const auto b = strip_wall(run_experiment(config));
  CHECK(results_to_csv(a) == results_to_csv(b));
}

TEST_CASE("write_results and IoError") {
  const std::string path = "harness_test_out.csv";
  write_results({}, path, "csv");
  CHECK(slurp(path).rfind("scheme,", 0) == 0);
  std::remove(path.c_str());
  CHECK_THROWS_AS(write_results({}, path, "xml"), ValidationError);
  CHECK_THROWS_AS(write_results({}, "/nonexistent-dir/x.csv", "csv"), IoError);
}

TEST_CASE("modulation gain constant") {
  CHECK(modulation_gain_db() == doctest::Approx(0.676).epsilon(1e-3));
}

TEST_CASE("CLI exit codes and presets listing") {
  const std::string cli = LATNC_CLI_PATH;
  auto run = [](const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  };
  CHECK(run(cli + " presets list > cli_presets.txt") == 0);
  CHECK(slurp("cli_presets.txt") ==
        "fig10_11_ldlc\nfig12_qpsk\nfig14_16qam\n");
  std::remove("cli_presets.txt");

  {
    std::ofstream cfg("cli_cfg.json");
    cfg << R"({"scheme":"shaping-gain-1d","L":4})";
  }
  CHECK(run(cli + " run --config cli_cfg.json --out cli_out.csv 2>/dev/null") ==
        0);
  const auto rows = read_results_csv(slurp("cli_out.csv"));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].snr_db == doctest::Approx(0.7918).epsilon(1e-3));
  std::remove("cli_out.csv");

  {
    std::ofstream cfg("cli_bad.json");
    cfg << R"({"scheme":"nope"})";
  }
  CHECK(run(cli + " run --config cli_bad.json 2>/dev/null") == 2);
  CHECK(run(cli + " run --config does_not_exist.json 2>/dev/null") == 2);
  CHECK(run(cli + " bogus-subcommand 2>/dev/null") == 2);

  // runtime error (unwritable output) exits 1
  CHECK(run(cli + " run --config cli_cfg.json --out /nonexistent-dir/o.csv"
                  " 2>/dev/null") == 1);
  std::remove("cli_bad.json");
  std::remove("cli_cfg.json");
}
