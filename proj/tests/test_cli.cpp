#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "motionauth/data/corpus.hpp"
#include "motionauth/synth/synth.hpp"
#include "support/tmpdir.hpp"

#ifndef MOTIONAUTH_CLI
#define MOTIONAUTH_CLI "motionauth"
#endif

using namespace motionauth;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args, const matest::TmpDir& tmp,
                  const std::string& tag) {
  const auto log = tmp / (tag + ".log");
  const std::string cmd = std::string(MOTIONAUTH_CLI) + " " + args + " > " +
                          log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  r.output.assign(std::istreambuf_iterator<char>(in),
                  std::istreambuf_iterator<char>());
  return r;
}

}  // namespace

TEST_CASE("cli: synth then ingest round-trips the corpus digest") {
  matest::TmpDir tmp("cli_round");
  RunResult synth = run_cli(
      "synth --users 2 --trials 3 --seed 29 --out " + (tmp / "d").string(),
      tmp, "synth");
  REQUIRE(synth.exit_code == 0);
  RunResult ingest = run_cli("ingest --data " + (tmp / "d").string() +
                                 " --out " + (tmp / "t").string(),
                             tmp, "ingest");
  REQUIRE(ingest.exit_code == 0);

  SynthConfig cfg;
  cfg.n_users = 2;
  cfg.trials = 3;
  cfg.seed = 29;
  Corpus mem = generate_corpus(cfg);
  Corpus disk = load_trials(tmp / "t" / "trials.bin");
  CHECK(disk.digest == mem.digest);
  CHECK(disk.normalized);
  CHECK(disk.trials.size() == mem.trials.size());
}

TEST_CASE("cli: train without a window file names the missing path") {
  matest::TmpDir tmp("cli_train_missing");
  RunResult r = run_cli("train --windows " + (tmp / "nope.bin").string() +
                            " --out " + (tmp / "o").string(),
                        tmp, "train");
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("nope.bin") != std::string::npos);
}

TEST_CASE("cli: eval with a missing checkpoint exits nonzero") {
  matest::TmpDir tmp("cli_eval_missing");
  RunResult r = run_cli("eval --checkpoint " + (tmp / "no.ckpt").string() +
                            " --windows " + (tmp / "no.bin").string() +
                            " --out " + (tmp / "o").string(),
                        tmp, "eval");
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("no.ckpt") != std::string::npos);
}

TEST_CASE("cli: sweep with a missing corpus names the path") {
  matest::TmpDir tmp("cli_sweep_missing");
  RunResult r = run_cli("sweep --data " + (tmp / "absent").string() +
                            " --grid small --variant WESHKA --out " +
                            (tmp / "o").string(),
                        tmp, "sweep");
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("absent") != std::string::npos);
}

TEST_CASE("cli: unknown config key exits with the field path") {
  matest::TmpDir tmp("cli_badcfg");
  std::ofstream(tmp / "run.ini") << "[train]\nepochz = 5\n";
  RunResult r = run_cli("synth --users 2 --config " +
                            (tmp / "run.ini").string() + " --out " +
                            (tmp / "d").string(),
                        tmp, "synth");
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("train.epochz") != std::string::npos);
}

TEST_CASE("cli: config file values apply when flags are absent") {
  matest::TmpDir tmp("cli_cfg");
  std::ofstream(tmp / "run.ini")
      << "[synth]\nusers = 3\ntrials = 2\n[run]\nseed = 5\n";
  RunResult r = run_cli("synth --config " + (tmp / "run.ini").string() +
                            " --out " + (tmp / "d").string(),
                        tmp, "synth");
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.find("3 users") != std::string::npos);
  DatasetManifest m = read_manifest(tmp / "d" / "manifest.json");
  CHECK(m.users.size() == 3);
  CHECK(m.users[0].sessions[0].trials.size() == 2);
}

TEST_CASE("cli: build-windows honors --dump-csv") {
  matest::TmpDir tmp("cli_dump");
  REQUIRE(run_cli("synth --users 2 --trials 2 --seed 3 --out " +
                      (tmp / "d").string(),
                  tmp, "synth")
              .exit_code == 0);
  REQUIRE(run_cli("ingest --data " + (tmp / "d").string() + " --out " +
                      (tmp / "t").string(),
                  tmp, "ingest")
              .exit_code == 0);
  RunResult r = run_cli(
      "build-windows --trials " + (tmp / "t" / "trials.bin").string() +
          " --user u00 --session 1 -w 130 --w-in 70 --stride 5 --seed 4"
          " --dump-csv " +
          (tmp / "w.csv").string() + " --out " + (tmp / "w").string(),
      tmp, "bw");
  REQUIRE(r.exit_code == 0);
  CHECK(std::filesystem::exists(tmp / "w.csv"));
  CHECK(std::filesystem::exists(tmp / "w" / "windows_u00_s1_130x70.bin"));
}

TEST_CASE("cli: small-grid sweep populates exactly the two small cells") {
  matest::TmpDir tmp("cli_smallgrid");
  RunResult r = run_cli(
      "sweep --synthetic 2 --trials 2 --grid small --variant WESHKA"
      " --preset desk --epochs 1 --batch 16 --stride 16 --workers 2"
      " --seed 12 --out " +
          (tmp / "r").string(),
      tmp, "sweep");
  REQUIRE(r.exit_code == 0);
  std::ifstream in(tmp / "r" / "eer_table.csv");
  std::string line;
  std::set<std::pair<int, int>> combos;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("w,", 0) == 0) continue;
    std::istringstream ls(line);
    std::string w, win;
    std::getline(ls, w, ',');
    std::getline(ls, win, ',');
    combos.insert({std::stoi(w), std::stoi(win)});
    ++rows;
  }
  CHECK(rows == 4);  // 2 cells x 2 users
  CHECK(combos == std::set<std::pair<int, int>>({{40, 30}, {50, 30}}));
}

TEST_CASE("cli: report re-renders summaries from a cells CSV") {
  matest::TmpDir tmp("cli_report");
  std::ofstream(tmp / "cells.csv")
      << "w,w_in,variant,user,value\n"
         "40,30,3Dfrom2D_WESHKA,u00,0.05\n"
         "40,30,3Dfrom2D_WESHKA,u01,0.07\n"
         "50,30,3Dfrom2D_WESHKA,u00,0.03\n"
         "50,30,3Dfrom2D_WESHKA,u01,0.05\n";
  RunResult r = run_cli("report --eer-cells " + (tmp / "cells.csv").string() +
                            " --out " + (tmp / "o").string(),
                        tmp, "report");
  REQUIRE(r.exit_code == 0);
  std::ifstream in(tmp / "o" / "eer_summary.csv");
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  CHECK(content.find("0.06") != std::string::npos);  // mean of 0.05/0.07
  CHECK(content.find("AVG") != std::string::npos);
  CHECK(std::filesystem::exists(tmp / "o" / "summary.md"));
}
