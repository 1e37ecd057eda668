#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "msk/simultaneous.hpp"
#include "msk/stream.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(MSK_CLI_PATH) + " " + args + " >/dev/null 2>/dev/null";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

const char* kRunHeader =
    "schema_version,row_kind,trial,n,epsilon,mode,planted_opt,exact_opt,extracted,ratio,"
    "active_pairs,sampled_edges,sketch_bytes";

}  // namespace

TEST_CASE("run: fixed seed gives identical output bytes and pinned schema") {
  const std::string out_a = "/tmp/msk_cli_run_a.csv";
  const std::string out_b = "/tmp/msk_cli_run_b.csv";
  std::string args = "run --n 64 --epsilon 0.34 --trials 3 --seed 7 --opt-hat known --out ";
  REQUIRE(run_cli(args + out_a) == 0);
  REQUIRE(run_cli(args + out_b) == 0);
  std::string a = slurp(out_a);
  CHECK(a == slurp(out_b));

  std::istringstream lines(a);
  std::string header;
  std::getline(lines, header);
  CHECK(header == kRunHeader);
  int rows = 0;
  std::string line;
  while (std::getline(lines, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 3 + 2);  // trials + median + p10
  for (char c : {'a', 'b'}) std::remove(("/tmp/msk_cli_run_" + std::string(1, c) + ".csv").c_str());
}

TEST_CASE("run: json output carries the schema version") {
  const std::string out = "/tmp/msk_cli_run.json";
  REQUIRE(run_cli("run --n 64 --epsilon 0.34 --trials 2 --seed 3 --format json --out " + out) ==
          0);
  std::string text = slurp(out);
  CHECK(text.find("\"schema_version\": 1") != std::string::npos);
  CHECK(text.find("\"aggregates\"") != std::string::npos);
  std::remove(out.c_str());
}

TEST_CASE("run: guess mode works end to end") {
  const std::string out = "/tmp/msk_cli_guess.csv";
  REQUIRE(run_cli("run --n 64 --epsilon 0.34 --trials 2 --seed 5 --opt-hat guess --out " + out) ==
          0);
  std::remove(out.c_str());
}

TEST_CASE("diagnose: sampler uniformity with a singleton support is exact") {
  const std::string out = "/tmp/msk_cli_diag.csv";
  REQUIRE(run_cli("diagnose --diagnose sampler_uniformity --domain 4096 --support 1 "
                  "--trials 200 --seed 2 --out " +
                  out) == 0);
  std::string text = slurp(out);
  // tv_distance column equals 0 on every Found draw
  CHECK(text.find(",0,0.05,") != std::string::npos);
  std::remove(out.c_str());
}

TEST_CASE("diagnose: unknown name fails") { CHECK(run_cli("diagnose --diagnose nope") == 2); }

TEST_CASE("run: a clean planted instance passes the pinned ratio bound") {
  CHECK(run_cli("run --n 64 --epsilon 0.3333333 --trials 1 --seed 19 --opt 64 --noise 0 "
                "--churn 0 --opt-hat known") == 0);
}

TEST_CASE("run: sketch bytes shrink as epsilon grows") {
  auto bytes_at = [](const std::string& epsilon) {
    const std::string out = "/tmp/msk_cli_space.csv";
    REQUIRE(run_cli("run --n 256 --epsilon " + epsilon +
                    " --trials 1 --seed 4 --opt-hat guess --out " + out) == 0);
    std::istringstream lines(slurp(out));
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    std::remove(out.c_str());
    return std::stoull(row.substr(row.rfind(',') + 1));
  };
  CHECK(bytes_at("0.5") <= bytes_at("0.3333333"));
}

TEST_CASE("config validation errors name the field") {
  CHECK(run_cli("run --trials 0") != 0);
  CHECK(run_cli("run --format xml") != 0);
  CHECK(run_cli("run --opt-hat sideways") != 0);
}

TEST_CASE("hard: writes per-player streams plus a passing report") {
  const std::string prefix = "/tmp/msk_cli_hard";
  REQUIRE(run_cli("hard --N 6 --r 2 --t 3 --players 2 --seed 9 --out " + prefix) == 0);

  msk::HardInstance inst = msk::parse_hard_instance(slurp(prefix + ".instance"));
  CHECK(inst.players == 2);

  for (int p = 0; p < 2; ++p) {
    msk::StreamSpec s = msk::read_stream(prefix + ".player" + std::to_string(p) + ".stream");
    CHECK(s.kind == msk::GraphKind::kGeneral);
    CHECK(s.updates.size() == 3);
  }
  std::string report = slurp(prefix + ".report.json");
  CHECK(report.find("\"bound_holds\": true") != std::string::npos);

  // Same seed reproduces identical files.
  const std::string again = "/tmp/msk_cli_hard2";
  REQUIRE(run_cli("hard --N 6 --r 2 --t 3 --players 2 --seed 9 --out " + again) == 0);
  CHECK(slurp(prefix + ".instance") == slurp(again + ".instance"));
  CHECK(slurp(prefix + ".player0.stream") == slurp(again + ".player0.stream"));

  for (const std::string& p : {prefix, again})
    for (const char* suffix : {".instance", ".player0.stream", ".player1.stream", ".report.json"})
      std::remove((p + suffix).c_str());
}

TEST_CASE("hard: impossible decomposition without an RS file is a clean error") {
  CHECK(run_cli("hard --N 24 --r 2 --t 12 --players 2") == 2);  // over the search budget
  CHECK(run_cli("hard --N 4 --r 2 --t 2 --players 2") == 2);    // 4-cycle has no induced pairs
}
