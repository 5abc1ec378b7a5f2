#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

// ENSCAL_BIN is injected by the build: the path of the CLI under test.

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

size_t line_count(const std::string& text) {
  size_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) {
    path = fs::temp_directory_path() / ("enscal_cli_" + name);
    fs::remove_all(path);
    fs::create_directories(path);
  }
};

RunResult run_cli(const TempDir& dir, const std::string& args,
                  const std::string& env_prefix = "") {
  fs::path out_path = dir.path / "_stdout.txt";
  fs::path err_path = dir.path / "_stderr.txt";
  std::string cmd = env_prefix + (env_prefix.empty() ? "" : " ") + ENSCAL_BIN +
                    " " + args + " > " + out_path.string() + " 2> " +
                    err_path.string();
  int rc = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string base_config(const fs::path& dataset, const fs::path& out_dir) {
  return "enscal_config 1\n"
         "dataset " + dataset.string() + "\n"
         "kind real_line\n"
         "method emos_normal\n"
         "training_length 15\n"
         "seed 7\n"
         "output_dir " + out_dir.string() + "\n";
}

}  // namespace

TEST_CASE("synth, calibrate, and rerun determinism") {
  TempDir dir("calibrate");
  fs::path data = dir.path / "data.csv";

  RunResult synth = run_cli(
      dir, "synth --scenario emos_normal --seed 42 --dates 40 --stations 3 "
           "--members 8 -o " + data.string());
  REQUIRE(synth.code == 0);
  REQUIRE(fs::exists(data));
  CHECK(synth.out.find("exact_mean_crps") != std::string::npos);

  SUBCASE("same seed reproduces the dataset byte for byte") {
    fs::path data2 = dir.path / "data2.csv";
    RunResult again = run_cli(
        dir, "synth --scenario emos_normal --seed 42 --dates 40 --stations 3 "
             "--members 8 -o " + data2.string());
    REQUIRE(again.code == 0);
    CHECK(slurp(data) == slurp(data2));
  }

  SUBCASE("calibrate emits the documented files") {
    fs::path out_dir = dir.path / "out";
    fs::path cfg = dir.path / "run.cfg";
    write_file(cfg, base_config(data, out_dir));

    RunResult cal = run_cli(dir, "calibrate -c " + cfg.string());
    REQUIRE(cal.code == 0);
    std::string scores = slurp(out_dir / "scores.csv");
    CHECK(line_count(scores) == 2);  // header plus one method row
    CHECK(scores.rfind("method,", 0) == 0);
    std::string cases = slurp(out_dir / "cases.csv");
    CHECK(line_count(cases) == 1 + 25 * 3);
    CHECK(fs::exists(out_dir / "hist_pit.csv"));
    std::string models = slurp(out_dir / "models.txt");
    CHECK(models.rfind("--- ", 0) == 0);
    CHECK(models.find("enscal_model 1") != std::string::npos);

    // The output directory override is the only environment hook.
    fs::path out2 = dir.path / "out2";
    RunResult cal2 = run_cli(dir, "calibrate -c " + cfg.string(),
                             "ENSCAL_OUTPUT_DIR=" + out2.string());
    REQUIRE(cal2.code == 0);
    CHECK(slurp(out2 / "scores.csv") == scores);
    CHECK(slurp(out2 / "cases.csv") == cases);
  }

  SUBCASE("raw method writes a rank histogram and no models") {
    fs::path out_dir = dir.path / "raw_out";
    fs::path cfg = dir.path / "raw.cfg";
    write_file(cfg, "enscal_config 1\n"
                    "dataset " + data.string() + "\n"
                    "kind real_line\n"
                    "method raw\n"
                    "training_length 15\n"
                    "output_dir " + out_dir.string() + "\n");
    RunResult cal = run_cli(dir, "calibrate -c " + cfg.string());
    REQUIRE(cal.code == 0);
    CHECK(fs::exists(out_dir / "hist_rank.csv"));
    CHECK(!fs::exists(out_dir / "hist_pit.csv"));
    CHECK(!fs::exists(out_dir / "models.txt"));

    SUBCASE("rank histogram from the emitted cases") {
      fs::path hist = dir.path / "rank_hist.csv";
      RunResult h = run_cli(dir, "hist --kind rank " +
                                     (out_dir / "cases.csv").string() +
                                     " --out " + hist.string());
      REQUIRE(h.code == 0);
      std::string text = slurp(hist);
      CHECK(text.rfind("bin_lo,bin_hi,count", 0) == 0);
      CHECK(line_count(text) == 1 + 9);  // eight members, nine rank bins
      CHECK(text == slurp(out_dir / "hist_rank.csv"));
    }
  }

  SUBCASE("write_models false suppresses models.txt") {
    fs::path out_dir = dir.path / "nm_out";
    fs::path cfg = dir.path / "nm.cfg";
    write_file(cfg, base_config(data, out_dir) + "write_models false\n");
    RunResult cal = run_cli(dir, "calibrate -c " + cfg.string());
    REQUIRE(cal.code == 0);
    CHECK(!fs::exists(out_dir / "models.txt"));
  }
}

TEST_CASE("sweep command") {
  TempDir dir("sweep");
  fs::path data = dir.path / "data.csv";
  REQUIRE(run_cli(dir, "synth --scenario emos_normal --seed 5 --dates 35 "
                       "--stations 2 --members 8 -o " + data.string())
              .code == 0);

  fs::path out_dir = dir.path / "out";
  fs::path cfg = dir.path / "sweep.cfg";
  write_file(cfg, base_config(data, out_dir) +
                      "sweep_lo 10\n"
                      "sweep_hi 12\n");
  RunResult sw = run_cli(dir, "sweep -c " + cfg.string() + " --jobs 2");
  REQUIRE(sw.code == 0);
  std::string rows = slurp(out_dir / "sweep.csv");
  CHECK(line_count(rows) == 1 + 3);
  std::string optima = slurp(out_dir / "sweep_optima.csv");
  CHECK(line_count(optima) == 1 + 3);
  CHECK(optima.rfind("score,best_length,best_value", 0) == 0);
  CHECK(sw.out.find("best") != std::string::npos);

  SUBCASE("sweep without a range is a config error") {
    fs::path cfg2 = dir.path / "norange.cfg";
    write_file(cfg2, base_config(data, out_dir));
    RunResult bad = run_cli(dir, "sweep -c " + cfg2.string());
    CHECK(bad.code == 2);
  }
}

TEST_CASE("PIT histogram from emitted cases") {
  TempDir dir("hist");
  fs::path data = dir.path / "data.csv";
  REQUIRE(run_cli(dir, "synth --scenario emos_normal --seed 9 --dates 30 "
                       "--stations 2 --members 8 -o " + data.string())
              .code == 0);
  fs::path out_dir = dir.path / "out";
  fs::path cfg = dir.path / "run.cfg";
  write_file(cfg, base_config(data, out_dir));
  REQUIRE(run_cli(dir, "calibrate -c " + cfg.string()).code == 0);

  fs::path hist = dir.path / "pit_hist.csv";
  RunResult h = run_cli(dir, "hist --kind pit --bins 11 " +
                                 (out_dir / "cases.csv").string() + " --out " +
                                 hist.string());
  REQUIRE(h.code == 0);
  std::string text = slurp(hist);
  CHECK(line_count(text) == 1 + 11);
  CHECK(text == slurp(out_dir / "hist_pit.csv"));

  SUBCASE("asking for ranks from a distribution run is a data error") {
    RunResult bad = run_cli(dir, "hist --kind rank " +
                                     (out_dir / "cases.csv").string());
    CHECK(bad.code == 3);
  }
}

TEST_CASE("exit codes") {
  TempDir dir("exitcodes");
  fs::path data = dir.path / "data.csv";
  REQUIRE(run_cli(dir, "synth --scenario emos_normal --seed 3 --dates 25 "
                       "--stations 2 --members 5 -o " + data.string())
              .code == 0);

  SUBCASE("no subcommand is usage") {
    CHECK(run_cli(dir, "").code == 2);
  }

  SUBCASE("missing required flag is usage") {
    CHECK(run_cli(dir, "hist " + data.string()).code == 2);
  }

  SUBCASE("unknown config key") {
    fs::path cfg = dir.path / "bad.cfg";
    write_file(cfg, base_config(data, dir.path / "out") + "mystery_key 5\n");
    RunResult r = run_cli(dir, "calibrate -c " + cfg.string());
    CHECK(r.code == 2);
    CHECK(r.err.find("mystery_key") != std::string::npos);
  }

  SUBCASE("missing dataset file") {
    fs::path cfg = dir.path / "nofile.cfg";
    write_file(cfg, base_config(dir.path / "absent.csv", dir.path / "out"));
    CHECK(run_cli(dir, "calibrate -c " + cfg.string()).code == 2);
  }

  SUBCASE("malformed dataset") {
    fs::path broken = dir.path / "broken.csv";
    write_file(broken, "date,station,obs,m1,m2\n2020-01-01,S1,banana,1,2\n");
    fs::path cfg = dir.path / "broken.cfg";
    write_file(cfg, "enscal_config 1\n"
                    "dataset " + broken.string() + "\n"
                    "kind real_line\n"
                    "method raw\n"
                    "training_length 1\n"
                    "output_dir " + (dir.path / "out").string() + "\n");
    RunResult r = run_cli(dir, "calibrate -c " + cfg.string());
    CHECK(r.code == 3);
  }

  SUBCASE("unknown scenario") {
    CHECK(run_cli(dir, "synth --scenario banana -o " +
                           (dir.path / "x.csv").string())
              .code == 2);
  }

  SUBCASE("bad synth parameter key") {
    CHECK(run_cli(dir, "synth --scenario emos_normal --param banana=1 -o " +
                           (dir.path / "x.csv").string())
              .code == 2);
  }
}

TEST_CASE("dataset CSVs round-trip through the CLI") {
  TempDir dir("roundtrip");
  fs::path data = dir.path / "data.csv";
  REQUIRE(run_cli(dir, "synth --scenario bma_gamma --seed 8 --dates 20 "
                       "--stations 2 --members 3 -o " + data.string())
              .code == 0);
  // Feeding the emitted dataset back through calibrate must not mutate it.
  std::string before = slurp(data);
  fs::path cfg = dir.path / "run.cfg";
  write_file(cfg, "enscal_config 1\n"
                  "dataset " + data.string() + "\n"
                  "kind nonnegative\n"
                  "method raw\n"
                  "training_length 5\n"
                  "output_dir " + (dir.path / "out").string() + "\n");
  REQUIRE(run_cli(dir, "calibrate -c " + cfg.string()).code == 0);
  CHECK(slurp(data) == before);
}
