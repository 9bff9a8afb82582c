#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "censcope/csv.hpp"

using namespace censcope;

namespace {

namespace fs = std::filesystem;

std::string cli() { return CENSCOPE_CLI_PATH; }

std::string tmp(const char* name) { return (fs::temp_directory_path() / name).string(); }

int run_cli(const std::string& args) {
  const std::string cmd = cli() + " " + args + " > " + tmp("censcope_cli_stdout.txt") +
                          " 2> " + tmp("censcope_cli_stderr.txt");
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("no subcommand or bad flags exit with the validation code") {
  CHECK(run_cli("") == 2);
  CHECK(run_cli("generate --n 10") == 2);                      // missing --out
  CHECK(run_cli("frobnicate") == 2);                           // unknown subcommand
  CHECK(run_cli("generate --n 0 --out " + tmp("x.csv")) == 2); // out-of-range n
  CHECK(run_cli("--help") == 0);
}

TEST_CASE("generate is deterministic in the seed and respects the scheme") {
  const std::string a = tmp("censcope_gen_a.csv"), b = tmp("censcope_gen_b.csv");
  REQUIRE(run_cli("generate --n 150 --seed 5 --scheme sep --epsilon 0.2 --out " + a) == 0);
  REQUIRE(run_cli("generate --n 150 --seed 5 --scheme sep --epsilon 0.2 --out " + b) == 0);
  CHECK(slurp(a) == slurp(b));
  const CsvTable table = read_csv(a);
  REQUIRE(table.header.size() == 5);
  CHECK(table.header[0] == "t");
  REQUIRE(table.rows.size() == 150);
  for (const auto& row : table.rows)
    CHECK(std::stod(row[1]) - std::stod(row[0]) >= 0.2);

  const std::string c = tmp("censcope_gen_c.csv");
  REQUIRE(run_cli("generate --n 150 --seed 6 --scheme sep --epsilon 0.2 --out " + c) == 0);
  CHECK(slurp(a) != slurp(c));
}

TEST_CASE("estimate produces a monotone curve and rejects bad input") {
  const std::string data = tmp("censcope_est_data.csv");
  const std::string curve = tmp("censcope_est_curve.csv");
  REQUIRE(run_cli("generate --n 300 --seed 8 --out " + data) == 0);
  for (const std::string method : {"mle", "smle", "birge"}) {
    REQUIRE(run_cli("estimate --method " + method + " --in " + data + " --out " + curve) == 0);
    const CsvTable t = read_csv(curve);
    REQUIRE(t.rows.size() > 2);
    if (method != "birge") {  // the histogram estimator need not be monotone
      double prev = -1e300;
      for (const auto& row : t.rows) {
        const double v = std::stod(row[1]);
        CHECK(v >= prev - 1e-12);
        prev = v;
      }
    }
  }
  // malformed csv
  const std::string bad = tmp("censcope_bad.csv");
  std::ofstream(bad) << "t,u,d1,d2,d3\n0.5,0.2,1,0\n";
  CHECK(run_cli("estimate --in " + bad + " --out " + curve) == 2);
  // bandwidth outside its validity range
  CHECK(run_cli("estimate --method smle --bandwidth 0.7 --in " + data + " --out " + curve) == 2);
}

TEST_CASE("seed falls back to the environment variable") {
  const std::string a = tmp("censcope_env_a.csv"), b = tmp("censcope_env_b.csv");
  REQUIRE(std::system((std::string("CENSCOPE_SEED=77 ") + cli() + " generate --n 50 --out " + a +
                       " > /dev/null 2>&1")
                          .c_str()) == 0);
  REQUIRE(run_cli("generate --n 50 --seed 77 --out " + b) == 0);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("config file supplies defaults that flags override") {
  const std::string conf = tmp("censcope_conf.toml");
  std::ofstream(conf) << "[generate]\nn=60\nseed=3\nout=\"" << tmp("censcope_conf_out.csv")
                      << "\"\n";
  REQUIRE(run_cli("generate --config " + conf) == 0);
  CHECK(read_csv(tmp("censcope_conf_out.csv")).rows.size() == 60);
  // a flag on the command line wins over the file
  REQUIRE(run_cli("generate --config " + conf + " --n 25") == 0);
  CHECK(read_csv(tmp("censcope_conf_out.csv")).rows.size() == 25);
}

TEST_CASE("simulate emits the table csv on stdout") {
  REQUIRE(run_cli("simulate --table 2 --scale 0.001 --seed 4") == 0);
  std::istringstream out(slurp(tmp("censcope_cli_stdout.txt")));
  std::string header;
  REQUIRE(std::getline(out, header));
  CHECK(header == "table,n,t0,estimator,scaled_mse,scaled_var,scaled_bias_sq,mc_se,asymptotic_ref");
  std::string line;
  int rows = 0;
  while (std::getline(out, line))
    if (!line.empty()) ++rows;
  CHECK(rows > 0);
}

TEST_CASE("asymptotics reports the non-separated constants") {
  REQUIRE(run_cli("asymptotics --t0 0.5") == 0);
  const std::string out = slurp(tmp("censcope_cli_stdout.txt"));
  CHECK(out.find("minimax_constant") != std::string::npos);
  CHECK(out.find("0.258") != std::string::npos);  // minimax constant at any t0
}

TEST_CASE("phi solves the variance equation and reports the variance") {
  REQUIRE(run_cli("phi --t 0.5 --m 500") == 0);
  const std::string err = slurp(tmp("censcope_cli_stderr.txt"));
  CHECK(err.find("theta_variance=") != std::string::npos);
  // value close to the frozen reference 0.390
  const auto pos = err.find("theta_variance=");
  const double v = std::stod(err.substr(pos + 15));
  CHECK(v == doctest::Approx(0.3904).epsilon(0.01));
}
