#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>

#include "helpers.hpp"

namespace {

int run(const std::string& args, const std::filesystem::path& log) {
  const std::string cmd = std::string(JASMINE_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("synth, run and report") {
    auto dir = testing::scratch_dir("cli");
    const auto log = dir / "log.txt";
    REQUIRE(run("synth --rows 400 --features 4 --seed 3 --out " + (dir / "d.csv").string(), log) == 0);
    CHECK(std::filesystem::exists(dir / "d.csv"));

    const auto out = dir / "run";
    const std::string common = "--scale smoke --dataset csv --data " + (dir / "d.csv").string() +
                               " --set L0=40 --set E=100 --set Q=10 --set N=30 --set S=2 --set gbm.ntrees=5 --out " +
                               out.string() + " --quiet";
    CHECK(run("run " + common, log) == 0);
    CHECK(std::filesystem::exists(out / "learning_curves.csv"));
    CHECK(std::filesystem::exists(out / "wilcoxon.csv"));

    CHECK(run("report --runs " + out.string(), log) == 0);
    CHECK(testing::read_file(log).find("t_ref") != std::string::npos);
  }

  TEST_CASE("configuration errors exit with 2") {
    auto dir = testing::scratch_dir("cli-err");
    const auto log = dir / "log.txt";
    CHECK(run("run --scale smoke --set Q=zero --out " + dir.string(), log) == 2);
    CHECK(testing::read_file(log).find("Q") != std::string::npos);
    CHECK(run("run --scale smoke --dataset nslkdd --data-dir " + (dir / "none").string() + " --out " + dir.string(),
              log) == 2);
    CHECK(run("report --runs " + (dir / "missing").string(), log) == 1);
    CHECK(run("frobnicate", log) != 0);
  }

  TEST_CASE("tuning subcommands") {
    auto dir = testing::scratch_dir("cli-tune");
    const auto log = dir / "log.txt";
    const std::string common = "--scale smoke --set synthetic.rows=500 --set L0=100 --set E=100 --set Q=10 "
                               "--set gbm.tune_max_combos=2 --set gbm.timing=work --set gbm.ntrees=5 "
                               "--set jasmine.tune_sims=1 --out " + dir.string();
    CHECK(run("tune-gbm " + common, log) == 0);
    CHECK(std::filesystem::exists(dir / "tuning_gbm.csv"));
    CHECK(run("tune-jasmine " + common, log) == 0);
    CHECK(std::filesystem::exists(dir / "tuning_jasmine.csv"));
    CHECK(testing::read_file(log).find("grid 108") != std::string::npos);
  }
}
