#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "mpstomo/contract.hpp"
#include "mpstomo/sampler.hpp"
#include "mpstomo/state.hpp"
#include "mpstomo/states.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mpstomo_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  RunResult run(const std::string& args) const {
    const std::string out = path("stdout.txt");
    const std::string err = path("stderr.txt");
    const std::string cmd = std::string(MPSTOMO_CLI_PATH) + " " + args + " > " + out + " 2> " + err;
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, MakeStateRoundTrip) {
  const RunResult r = run("make-state --kind ghz --n 8 --out " + path("ghz.json"));
  ASSERT_EQ(r.status, 0) << r.err;
  const mpstomo::State s = mpstomo::load_state(path("ghz.json"));
  EXPECT_EQ(mpstomo::dense_from(std::get<mpstomo::Mps>(s)), mpstomo::dense_from(mpstomo::ghz_state(8)));
  const json manifest = json::parse(slurp(path("ghz.json.manifest.json")));
  EXPECT_EQ(manifest["command"], "make-state");
  EXPECT_EQ(manifest["state_digest"], mpstomo::state_digest(s));
}

TEST_F(Cli, MakeStateDeterministic) {
  ASSERT_EQ(run("--seed 7 make-state --kind random-mps --n 6 --chi 2 --out " + path("a.json")).status, 0);
  ASSERT_EQ(run("make-state --kind random-mps --n 6 --chi 2 --seed 7 --out " + path("b.json")).status, 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("make-state --kind thermal-ising --n 12 --out " + path("t.json")).status, 3);
  EXPECT_EQ(run("make-state --kind cluster --n 6 --rot-gamma 0.3").status, 2);
  EXPECT_EQ(run("make-state --kind ghz --n 4 --no-such-flag").status, 2);
  EXPECT_EQ(run("crb --state " + path("missing.json")).status, 2);
  EXPECT_EQ(run("--help").status, 0);
}

TEST_F(Cli, StateConfigBlock) {
  std::ofstream(path("spec.json")) << R"({"kind": "generalized_ghz", "n_sites": 5, "rot_gamma": 0.25})";
  ASSERT_EQ(run("make-state --config " + path("spec.json") + " --out " + path("g.json")).status, 0);
  EXPECT_EQ(mpstomo::serialize_state(mpstomo::load_state(path("g.json"))),
            mpstomo::serialize_state(mpstomo::State{mpstomo::generalized_ghz(5, 0.25)}));
  std::ofstream(path("bad.json")) << R"({"kind": "ghz", "n_sites": 5, "colour": 1})";
  EXPECT_EQ(run("make-state --config " + path("bad.json")).status, 2);
}

TEST_F(Cli, SampleHeaderAndWorkers) {
  ASSERT_EQ(run("--seed 3 make-state --kind random-mps --n 5 --realness complex --out " + path("s.json")).status, 0);
  ASSERT_EQ(run("--seed 11 --workers 1 sample --state " + path("s.json") + " --m 3000 --out " + path("a.txt")).status,
            0);
  ASSERT_EQ(run("--seed 11 --workers 3 sample --state " + path("s.json") + " --m 3000 --out " + path("b.txt")).status,
            0);
  EXPECT_EQ(slurp(path("a.txt")), slurp(path("b.txt")));
  const mpstomo::SampleSet set = mpstomo::load_samples(path("a.txt"));
  EXPECT_EQ(set.n_sites(), 5);
  EXPECT_EQ(set.seed(), 11u);
  EXPECT_EQ(set.state_digest(), mpstomo::state_digest(mpstomo::load_state(path("s.json"))));
  EXPECT_EQ(set.size(), 3000u);
}

TEST_F(Cli, CrbGhzRealTi) {
  ASSERT_EQ(run("make-state --kind ghz --n 10 --out " + path("ghz.json")).status, 0);
  const RunResult r = run("crb --state " + path("ghz.json") + " --model real --ti --diagonal --fisher exact-diagonal");
  ASSERT_EQ(r.status, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_NEAR(doc["tr_ki"].get<double>(), 3.5, 0.035);
  EXPECT_EQ(doc["fisher_provenance"], "exact_diagonal_ti");
  EXPECT_TRUE(doc["converged"].get<bool>());
  EXPECT_EQ(doc["n"], 10);

  const RunResult csv = run("--csv crb --state " + path("ghz.json") + " --model real --ti --diagonal");
  ASSERT_EQ(csv.status, 0);
  EXPECT_EQ(csv.out.substr(0, csv.out.find('\n')), "N,tr_ki,bound_per_sample");
}

TEST_F(Cli, CrbReportsNonConvergence) {
  ASSERT_EQ(run("make-state --kind ghz --n 6 --out " + path("ghz.json")).status, 0);
  const RunResult r = run("crb --state " + path("ghz.json") +
                          " --model complex --ti --diagonal --fisher monte-carlo --mc-max 4096 --mc-tol 0");
  ASSERT_EQ(r.status, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_FALSE(doc["converged"].get<bool>());
  EXPECT_EQ(doc["samples_used"], 4096);
  EXPECT_NE(r.err.find("did not converge"), std::string::npos);
}

TEST_F(Cli, MetricsIdenticalAndPure) {
  ASSERT_EQ(run("--seed 1 make-state --kind random-mps --n 4 --realness complex --out " + path("a.json")).status, 0);
  ASSERT_EQ(run("--seed 2 make-state --kind random-mps --n 4 --realness complex --out " + path("b.json")).status, 0);
  const json same = json::parse(run("metrics " + path("a.json") + " " + path("a.json")).out);
  EXPECT_NEAR(same["r"].get<double>(), 0.0, 1e-12);
  EXPECT_NEAR(same["d"].get<double>(), 0.0, 1e-12);
  EXPECT_NEAR(same["fidelity"].get<double>(), 1.0, 1e-12);
  const json pair = json::parse(run("metrics " + path("a.json") + " " + path("b.json")).out);
  EXPECT_NEAR(pair["r"].get<double>(), 2.0 * (1.0 - pair["fidelity"].get<double>()), 1e-10);
}

TEST_F(Cli, GhzAnalytic) {
  const json ti = json::parse(run("ghz-analytic --n 12 --model real --ti").out);
  EXPECT_NEAR(ti["tr_ki"].get<double>(), 3.5, 0.035);
  EXPECT_EQ(ti["k"].size(), 4u);
  const json nonti = json::parse(run("ghz-analytic --n 5 --model real").out);
  EXPECT_NEAR(nonti["tr_ki"].get<double>(), 11.5, 0.115);
  const json complex = json::parse(run("ghz-analytic --n 8 --model complex --ti").out);
  EXPECT_NEAR(complex["tr_ki"].get<double>(), 128.0, 0.02 * 128.0);
  EXPECT_EQ(run("ghz-analytic --n 2").status, 2);
}

TEST_F(Cli, MleWithAndWithoutTarget) {
  ASSERT_EQ(run("--seed 5 make-state --kind random-mps --n 4 --realness complex --out " + path("t.json")).status, 0);
  ASSERT_EQ(run("--seed 6 sample --state " + path("t.json") + " --m 2000 --out " + path("s.txt")).status, 0);
  const std::string opts = " --restarts 2 --epochs 60";
  const RunResult with = run("mle --samples " + path("s.txt") + " --target " + path("t.json") + opts);
  ASSERT_EQ(with.status, 0) << with.err;
  const json a = json::parse(with.out);
  EXPECT_TRUE(a.contains("metrics"));
  EXPECT_TRUE(a["metrics"].contains("fidelity"));
  EXPECT_EQ(a["model"]["kind"], "mps");
  const json b = json::parse(run("mle --samples " + path("s.txt") + opts).out);
  EXPECT_FALSE(b.contains("metrics"));
  EXPECT_EQ(a["final_nll"], b["final_nll"]);

  ASSERT_EQ(run("--seed 9 make-state --kind random-mps --n 4 --out " + path("other.json")).status, 0);
  const RunResult warn = run("mle --samples " + path("s.txt") + " --target " + path("other.json") + opts);
  EXPECT_EQ(warn.status, 0);
  EXPECT_NE(warn.err.find("warning"), std::string::npos);
}

TEST_F(Cli, MleBatchSummary) {
  ASSERT_EQ(run("--seed 5 make-state --kind random-mps --n 4 --realness complex --out " + path("t.json")).status, 0);
  std::string files;
  for (int s = 0; s < 3; ++s) {
    const std::string f = path("s" + std::to_string(s) + ".txt");
    ASSERT_EQ(run("--seed " + std::to_string(20 + s) + " sample --state " + path("t.json") + " --m 1000 --out " + f)
                  .status,
              0);
    files += " " + f;
  }
  std::ofstream(path("opt.json")) << R"({"restarts": 1, "max_epochs": 40, "method": "sgd_nesterov"})";
  const RunResult r = run("mle --samples" + files + " --target " + path("t.json") + " --config " + path("opt.json") +
                          " --nll-csv " + path("nll.csv"));
  ASSERT_EQ(r.status, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["summary"]["sets"], 3);
  EXPECT_TRUE(doc["summary"]["infidelity"].contains("mean"));
  EXPECT_TRUE(doc["summary"]["infidelity"].contains("std"));
  EXPECT_EQ(doc["results"].size(), 3u);
  EXPECT_EQ(slurp(path("nll.csv")).substr(0, 20), "set,restart,epoch,nl");
}

TEST_F(Cli, ReplayReproducesOutput) {
  ASSERT_EQ(run("--seed 4 make-state --kind random-mpdo --n 4 --kappa 2 --realness complex --out " + path("m.json"))
                .status,
            0);
  ASSERT_EQ(run("--seed 8 --workers 2 sample --state " + path("m.json") + " --m 2500 --out " + path("s.txt")).status,
            0);
  const std::string first = slurp(path("s.txt"));
  fs::remove(path("s.txt"));
  ASSERT_EQ(run("replay " + path("s.txt.manifest.json")).status, 0);
  EXPECT_EQ(slurp(path("s.txt")), first);
  const json manifest = json::parse(slurp(path("s.txt.manifest.json")));
  EXPECT_EQ(manifest["inputs"][0]["digest"], mpstomo::state_digest(mpstomo::load_state(path("m.json"))));
  EXPECT_EQ(manifest["seeds"]["seed"], 8);
}

TEST_F(Cli, SweepFig2Csv) {
  const RunResult r = run("sweep fig2 --n-min 8 --n-max 16 --n-step 4 --gammas 0 0.5");
  ASSERT_EQ(r.status, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "# mpstomo-sweep fig2 v1");
  std::getline(lines, line);
  EXPECT_EQ(line, "rot_gamma,n,tr_ki,zeta");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 6);
}
