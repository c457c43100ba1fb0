// End-to-end checks of the command line tool. Each case runs the real
// binary (path injected by CMake) in a scratch directory and inspects
// exit codes, output files, and stderr.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

class Scratch {
 public:
  Scratch() {
    static int counter = 0;
    dir_ = fs::temp_directory_path() /
           ("flexseas_cli_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }
  const fs::path& dir() const { return dir_; }
  fs::path file(const std::string& name) const { return dir_ / name; }

  RunResult run(const std::string& args) const {
    const fs::path out = dir_ / "stdout.txt";
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd = std::string(FLEXSEAS_CLI_PATH) + " " + args +
                            " > " + out.string() + " 2> " + err.string();
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

 private:
  fs::path dir_;
};

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    rows.push_back(std::move(fields));
  }
  return rows;
}

const char* kLinearSim = R"({
  "n": 200,
  "seed": 3,
  "curves": {"preset": "linear", "d": 2}
})";

}  // namespace

TEST_CASE("help and version exit cleanly") {
  Scratch s;
  CHECK(s.run("--help").exit_code == 0);
  const RunResult v = s.run("--version");
  CHECK(v.exit_code == 0);
  CHECK(v.out.find("0.") != std::string::npos);
  // A bare invocation is a usage error.
  CHECK(s.run("").exit_code == 2);
  CHECK(s.run("frobnicate --config x.json").exit_code == 2);
}

TEST_CASE("simulate writes a deterministic panel with metadata") {
  Scratch s;
  spit(s.file("sim.json"), R"({
    "n": 100,
    "seed": 42,
    "curves": {"preset": "trig", "d": 4, "amplitude": 1.0},
    "error": {"variant": "iid", "d": 4,
              "sigma_eps": [[0.25,0,0,0],[0,0.25,0,0],
                            [0,0,0.25,0],[0,0,0,0.25]]}
  })");
  const std::string out1 = (s.dir() / "run1").string();
  const std::string out2 = (s.dir() / "run2").string();
  CHECK(s.run("simulate --config " + s.file("sim.json").string() + " --out " +
              out1 + " --quiet")
            .exit_code == 0);
  CHECK(s.run("simulate --config " + s.file("sim.json").string() + " --out " +
              out2 + " --quiet")
            .exit_code == 0);

  const std::string csv = slurp(fs::path(out1) / "panel.csv");
  CHECK(csv == slurp(fs::path(out2) / "panel.csv"));
  const auto rows = parse_csv(csv);
  REQUIRE(rows.size() == 101);  // header + 100 periods
  CHECK(rows[0] ==
        std::vector<std::string>{"t", "season_1", "season_2", "season_3",
                                 "season_4"});
  CHECK(rows[100][0] == "1");

  const nlohmann::json meta =
      nlohmann::json::parse(slurp(fs::path(out1) / "panel.meta.json"));
  CHECK(meta.at("command") == "simulate");
  CHECK(meta.at("seed") == 42);
  CHECK(meta.at("config_hash").get<std::string>().size() == 16);

  // Overriding the seed changes the data and is recorded.
  const std::string out3 = (s.dir() / "run3").string();
  CHECK(s.run("simulate --config " + s.file("sim.json").string() + " --out " +
              out3 + " --seed 43 --quiet")
            .exit_code == 0);
  CHECK(slurp(fs::path(out3) / "panel.csv") != csv);
  const nlohmann::json meta3 =
      nlohmann::json::parse(slurp(fs::path(out3) / "panel.meta.json"));
  CHECK(meta3.at("seed") == 43);
}

TEST_CASE("simulate then fit recovers noiseless linear curves") {
  Scratch s;
  spit(s.file("sim.json"), kLinearSim);
  const std::string data = (s.dir() / "data").string();
  REQUIRE(s.run("simulate --config " + s.file("sim.json").string() +
                " --out " + data + " --quiet")
              .exit_code == 0);

  spit(s.file("fit.json"), std::string(R"({
    "input": ")") + (fs::path(data) / "panel.csv").string() + R"(",
    "kernel": "epanechnikov",
    "bandwidth": 0.2,
    "grid_points": 21
  })");
  const std::string fitdir = (s.dir() / "fit").string();
  const RunResult r = s.run("fit --config " + s.file("fit.json").string() +
                            " --out " + fitdir + " --quiet");
  CHECK(r.exit_code == 0);
  CHECK_FALSE(fs::exists(fs::path(fitdir) / "fit.warnings.txt"));

  const auto rows = parse_csv(slurp(fs::path(fitdir) / "fit.csv"));
  REQUIRE(rows.size() == 22);
  CHECK(rows[0] == std::vector<std::string>{
                       "t", "alpha_hat", "beta_1_hat", "beta_2_hat",
                       "alpha_prime_hat", "beta_1_prime_hat",
                       "beta_2_prime_hat"});
  // Row 10 is t = 0.5: alpha = 3.5, beta_1 = 0, derivative (3, 1, -1).
  REQUIRE(rows[11].size() == 7);
  CHECK(std::stod(rows[11][0]) == 0.5);
  CHECK(std::stod(rows[11][1]) == doctest::Approx(3.5).epsilon(1e-9));
  CHECK(std::stod(rows[11][2]) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(std::stod(rows[11][3]) ==
        doctest::Approx(-std::stod(rows[11][2])).epsilon(1e-12));
  CHECK(std::stod(rows[11][4]) == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(std::stod(rows[11][5]) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::stod(rows[11][6]) == doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("degenerate grid points leave empty fields and a warnings file") {
  Scratch s;
  spit(s.file("sim.json"), kLinearSim);
  const std::string data = (s.dir() / "data").string();
  REQUIRE(s.run("simulate --config " + s.file("sim.json").string() +
                " --out " + data + " --quiet")
              .exit_code == 0);

  // h = 0.004 on a 200-point grid puts at most one point in any window.
  spit(s.file("fit.json"), std::string(R"({
    "input": ")") + (fs::path(data) / "panel.csv").string() + R"(",
    "kernel": "epanechnikov",
    "bandwidth": 0.004,
    "grid_points": 5
  })");
  const std::string fitdir = (s.dir() / "fit").string();
  const RunResult r = s.run("fit --config " + s.file("fit.json").string() +
                            " --out " + fitdir);
  CHECK(r.exit_code == 0);  // per-point failures do not abort the run
  CHECK(r.out.find("5 degenerate") != std::string::npos);

  const auto rows = parse_csv(slurp(fs::path(fitdir) / "fit.csv"));
  REQUIRE(rows.size() == 6);
  for (int i = 1; i <= 5; ++i) {
    REQUIRE(rows[i].size() == 7);
    for (int j = 1; j < 7; ++j) CHECK(rows[i][j].empty());
  }
  const std::string warn = slurp(fs::path(fitdir) / "fit.warnings.txt");
  CHECK(warn.find("DegenerateWindow") != std::string::npos);
  CHECK(warn.find("t=0.5") != std::string::npos);
}

TEST_CASE("configuration mistakes exit with code 2 and a typed message") {
  Scratch s;
  // Missing config file.
  RunResult r = s.run("simulate --config " + s.file("absent.json").string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("ConfigError") != std::string::npos);

  // Unknown key.
  spit(s.file("bad.json"), R"({"n": 50, "curvse": {"preset": "trig", "d": 2}})");
  r = s.run("simulate --config " + s.file("bad.json").string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("curvse") != std::string::npos);

  // Structural dimension error surfaces by name.
  spit(s.file("d1.json"),
       R"({"n": 50, "seed": 1, "curves": {"preset": "linear", "d": 1}})");
  r = s.run("simulate --config " + s.file("d1.json").string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("DimensionError") != std::string::npos);

  // Too few replications.
  spit(s.file("thin.json"), R"({
    "error": {"variant": "iid", "d": 2, "sigma_eps": [[1,0],[0,1]]},
    "kernel": "epanechnikov",
    "n_list": [400],
    "h_rule": {"fixed": [0.2]},
    "eval_points": [0.5],
    "replications": 50,
    "base_seed": 1
  })");
  r = s.run("mc-lemma6 --config " + s.file("thin.json").string() + " --out " +
            (s.dir() / "mc").string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("replications") != std::string::npos);

  // Malformed input CSV for fit.
  spit(s.file("panel.csv"), "t,wrong_1,wrong_2\n0.5,1,2\n1,3,4\n");
  spit(s.file("fit.json"), std::string(R"({
    "input": ")") + s.file("panel.csv").string() + R"(",
    "kernel": "epanechnikov",
    "bandwidth": 0.2
  })");
  r = s.run("fit --config " + s.file("fit.json").string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("ConfigError") != std::string::npos);
}

TEST_CASE("numerical breakdown inside a study exits with code 3") {
  Scratch s;
  spit(s.file("mc.json"), R"({
    "curves": {"preset": "trig", "d": 2, "amplitude": 1.0},
    "error": {"variant": "iid", "d": 2, "sigma_eps": [[1,0],[0,1]]},
    "kernel": "epanechnikov",
    "n_list": [120],
    "h_rule": {"fixed": [0.004]},
    "eval_points": [0.5],
    "replications": 100,
    "base_seed": 1
  })");
  const RunResult r = s.run("mc-bias --config " + s.file("mc.json").string() +
                            " --out " + (s.dir() / "mc").string());
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("DegenerateWindow") != std::string::npos);
  CHECK(r.err.find("replication 0") != std::string::npos);
}

TEST_CASE("monte carlo reports are reproducible and thread-invariant") {
  Scratch s;
  spit(s.file("mc.json"), R"({
    "error": {"variant": "iid", "d": 2, "sigma_eps": [[1,0],[0,1]]},
    "kernel": "epanechnikov",
    "n_list": [400],
    "h_rule": {"fixed": [0.2]},
    "eval_points": [0.5],
    "replications": 100,
    "base_seed": 5
  })");
  const std::string a = (s.dir() / "a").string();
  const std::string b = (s.dir() / "b").string();
  const std::string c = (s.dir() / "c").string();
  CHECK(s.run("mc-lemma6 --config " + s.file("mc.json").string() + " --out " +
              a + " --threads 1 --quiet")
            .exit_code == 0);
  CHECK(s.run("mc-lemma6 --config " + s.file("mc.json").string() + " --out " +
              b + " --threads 3 --quiet")
            .exit_code == 0);
  CHECK(s.run("mc-lemma6 --config " + s.file("mc.json").string() + " --out " +
              c + " --threads 3 --seed 77 --quiet")
            .exit_code == 0);

  const std::string report = slurp(fs::path(a) / "report.json");
  CHECK(report == slurp(fs::path(b) / "report.json"));
  CHECK(slurp(fs::path(a) / "summary.csv") ==
        slurp(fs::path(b) / "summary.csv"));
  CHECK(report != slurp(fs::path(c) / "report.json"));

  const nlohmann::json parsed = nlohmann::json::parse(report);
  CHECK(parsed.at("study") == "lemma6");
  CHECK(parsed.at("cells").size() == 1);
  CHECK(parsed.at("cells")[0].at("n") == 400);

  // The seed override is reflected in the sidecar hash and seed.
  const nlohmann::json ma =
      nlohmann::json::parse(slurp(fs::path(a) / "report.meta.json"));
  const nlohmann::json mc =
      nlohmann::json::parse(slurp(fs::path(c) / "report.meta.json"));
  CHECK(ma.at("seed") == 5);
  CHECK(mc.at("seed") == 77);
  CHECK(ma.at("config_hash") != mc.at("config_hash"));
}
