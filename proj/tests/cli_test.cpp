// Copyright 2026 The QX Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// End-to-end tests that drive the installed binary through a shell, the way
// a user would.

#include <cstdlib>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include "qx/fusion.hpp"
#include "qx/io.hpp"
#include "qx/metrics.hpp"
#include "test_util.hpp"

using testutil::read_file;
using testutil::write_file;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

const std::string kDir = testutil::make_temp_dir("cli");
int g_run = 0;

std::string path_of(const std::string& name) { return kDir + "/" + name; }

CliResult run_cli(const std::string& args) {
  const std::string out_p = path_of("stdout." + std::to_string(g_run));
  const std::string err_p = path_of("stderr." + std::to_string(g_run));
  ++g_run;
  const std::string cmd = std::string(QX_CLI_PATH) + " " + args + " > " + out_p +
                          " 2> " + err_p;
  const int rc = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = read_file(out_p);
  r.err = read_file(err_p);
  return r;
}

// One small cohort shared by most cases below.
struct Fixture {
  std::string emb = path_of("emb.csv");
  std::string trials = path_of("trials.txt");
  Fixture() {
    CliResult r = run_cli("synth --n-speakers 8 --utts-per-speaker 4 --dimension 8"
                          " --seed 3 --n-target 40 --n-nontarget 60"
                          " --embeddings-out " + emb + " --trials-out " + trials);
    REQUIRE(r.exit_code == 0);
  }
};

const Fixture& fixture() {
  static Fixture f;
  return f;
}

}  // namespace

TEST_CASE("cli: synth is byte-deterministic and feeds score cleanly") {
  const std::string e1 = path_of("d1.csv"), t1 = path_of("d1.txt");
  const std::string e2 = path_of("d2.csv"), t2 = path_of("d2.txt");
  const std::string flags = "synth --n-speakers 4 --utts-per-speaker 3 --dimension 4"
                            " --seed 11 --n-target 5 --n-nontarget 5 ";
  CHECK(run_cli(flags + "--embeddings-out " + e1 + " --trials-out " + t1).exit_code == 0);
  CHECK(run_cli(flags + "--embeddings-out " + e2 + " --trials-out " + t2).exit_code == 0);
  CHECK(read_file(e1) == read_file(e2));
  CHECK(read_file(t1) == read_file(t2));

  CliResult r = run_cli("score --embeddings " + e1 + " --trials " + t1 +
                        " --output " + path_of("d1.scores.csv"));
  CHECK(r.exit_code == 0);
  CHECK(r.err.empty());  // no warnings on clean synthetic data
}

TEST_CASE("cli: default synth output feeds score without warnings") {
  const std::string e = path_of("def.csv"), t = path_of("def.txt");
  CliResult s = run_cli("synth --embeddings-out " + e + " --trials-out " + t);
  CHECK(s.exit_code == 0);
  CliResult r = run_cli("score --embeddings " + e + " --trials " + t +
                        " --output " + path_of("def.scores.csv"));
  CHECK(r.exit_code == 0);
  CHECK(r.err.empty());
}

TEST_CASE("cli: synth without same-speaker pairs fails") {
  CliResult r = run_cli("synth --n-speakers 4 --utts-per-speaker 1 --dimension 4"
                        " --n-target 1 --n-nontarget 1"
                        " --embeddings-out " + path_of("x.csv") +
                        " --trials-out " + path_of("x.txt"));
  CHECK(r.exit_code != 0);
  CHECK(r.err.find("same-speaker") != std::string::npos);
}

TEST_CASE("cli: identity qe reproduces the score command byte for byte") {
  const auto& f = fixture();
  const std::string a = path_of("base.scores.csv");
  const std::string b = path_of("qeid.scores.csv");
  CHECK(run_cli("score --embeddings " + f.emb + " --trials " + f.trials +
                " --output " + a).exit_code == 0);
  CHECK(run_cli("qe --embeddings " + f.emb + " --trials " + f.trials +
                " --alpha 1 --beta 0 --gamma 0 --output " + b).exit_code == 0);
  const std::string fa = read_file(a);
  CHECK(!fa.empty());
  CHECK(fa == read_file(b));
}

TEST_CASE("cli: qe rejects an oversized top-n with the bound in the message") {
  const auto& f = fixture();
  CliResult r = run_cli("qe --embeddings " + f.emb + " --trials " + f.trials +
                        " --top-n 99 --output " + path_of("never.csv"));
  CHECK(r.exit_code != 0);
  CHECK(r.err.find("N-1 = 31") != std::string::npos);
}

TEST_CASE("cli: unknown trial ids name the id") {
  const auto& f = fixture();
  const std::string bad = path_of("bad_trials.txt");
  write_file(bad, "1 spk0_utt0 ghost\n");
  CliResult r = run_cli("score --embeddings " + f.emb + " --trials " + bad +
                        " --output " + path_of("never2.csv"));
  CHECK(r.exit_code != 0);
  CHECK(r.err.find("ghost") != std::string::npos);
}

TEST_CASE("cli: empty trial file produces a header-only score file") {
  const auto& f = fixture();
  const std::string empty = path_of("empty_trials.txt");
  write_file(empty, "");
  const std::string out = path_of("empty.scores.csv");
  CliResult r = run_cli("score --embeddings " + f.emb + " --trials " + empty +
                        " --output " + out);
  CHECK(r.exit_code == 0);
  CHECK(read_file(out) == "enroll_id,test_id,score\n");
}

TEST_CASE("cli: fuse endpoints and divergence diagnostics") {
  const auto& f = fixture();
  const std::string a = path_of("fa.csv"), b = path_of("fb.csv");
  CHECK(run_cli("score --embeddings " + f.emb + " --trials " + f.trials +
                " --output " + a).exit_code == 0);
  CHECK(run_cli("qe --embeddings " + f.emb + " --trials " + f.trials +
                " --alpha 0.5 --beta 1 --top-n 3 --output " + b).exit_code == 0);

  const std::string fused = path_of("fused.csv");
  CHECK(run_cli("fuse --scores-a " + a + " --scores-b " + b +
                " --lambda 1.0 --output " + fused).exit_code == 0);
  CHECK(read_file(fused) == read_file(a));

  // direct hand check of one fused row at lambda 0.5 under z-normalization
  CHECK(run_cli("fuse --scores-a " + a + " --scores-b " + b +
                " --lambda 0.5 --normalize z --output " + fused).exit_code == 0);
  qx::ScoreSet sa = qx::load_scores(a), sb = qx::load_scores(b);
  qx::ScoreSet za = qx::normalize_scores(sa, qx::NormMode::z_norm);
  qx::ScoreSet zb = qx::normalize_scores(sb, qx::NormMode::z_norm);
  qx::ScoreSet got = qx::load_scores(fused);
  const double want = 0.5 * za.scores[0] + 0.5 * zb.scores[0];
  CHECK_NEAR(got.scores[0], want, 1e-5);  // score files carry 6 significant digits

  const std::string mismatched = path_of("mismatch.csv");
  write_file(mismatched, "enroll_id,test_id,score\nx,y,0.5\n");
  CliResult r = run_cli("fuse --scores-a " + a + " --scores-b " + mismatched +
                        " --lambda 0.5 --output " + path_of("never3.csv"));
  CHECK(r.exit_code != 0);
  CHECK(r.err.find("different trial counts") != std::string::npos);
}

TEST_CASE("cli: eval reports metrics and echoes the cost parameters") {
  const std::string scores = path_of("toy.scores.csv");
  write_file(scores,
             "enroll_id,test_id,score,label\n"
             "e0,t0,0.9,1\ne1,t1,0.8,1\ne2,t2,0.2,0\ne3,t3,0.1,0\n");
  const std::string report = path_of("toy.report.json");
  CliResult r = run_cli("eval --scores " + scores + " --report " + report +
                        " --det-csv " + path_of("toy.det.csv") +
                        " --p-target 0.05 --c-miss 1 --c-fa 1 --system toy");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("eer_percent=0.000") != std::string::npos);
  CHECK(r.out.find("min_dcf=0.000") != std::string::npos);

  auto j = nlohmann::json::parse(read_file(report));
  CHECK(j["system"] == "toy");
  CHECK(j["n_target"] == 2);
  CHECK(j["n_nontarget"] == 2);
  CHECK(j["eer_percent"] == 0.0);
  CHECK(j["min_dcf_normalized"] == 0.0);
  CHECK(j["dcf_params"]["c_miss"] == 1.0);
  CHECK(j["dcf_params"]["c_fa"] == 1.0);
  CHECK(j["dcf_params"]["p_target"] == 0.05);

  const std::string det = read_file(path_of("toy.det.csv"));
  CHECK(det.find("threshold,p_miss,p_fa\n") == 0);
  CHECK(det.find("-inf,0,1") != std::string::npos);

  // a one-class file cannot be evaluated
  const std::string one_class = path_of("oneclass.csv");
  write_file(one_class, "enroll_id,test_id,score,label\ne0,t0,0.9,1\n");
  CliResult bad = run_cli("eval --scores " + one_class);
  CHECK(bad.exit_code != 0);
  CHECK(bad.err.find("no nontarget") != std::string::npos);
}

TEST_CASE("cli: sweep over a qe grid") {
  const auto& f = fixture();
  const std::string csv = path_of("sweep.csv");
  const std::string json = path_of("sweep.json");

  SUBCASE("identity-only grid equals the baseline evaluation") {
    CliResult r = run_cli("sweep --embeddings " + f.emb + " --trials " + f.trials +
                          " --alphas 1 --betas 0 --gammas 0 --top-ns 0"
                          " --report-csv " + csv + " --report-json " + json);
    CHECK(r.exit_code == 0);
    CHECK(r.err.find("1 grid points") != std::string::npos);

    const std::string base = path_of("sweep_base.csv");
    CHECK(run_cli("score --embeddings " + f.emb + " --trials " + f.trials +
                  " --output " + base).exit_code == 0);
    qx::EvalResult ev = qx::evaluate(qx::load_scores(base));
    char expect[64];
    std::snprintf(expect, sizeof(expect), "1,0,0,0,%.3f,%.6g,ok", 100.0 * ev.eer,
                  ev.min_dcf);
    const std::string body = read_file(csv);
    CHECK(body.find("alpha,beta,gamma,top_n,eer_percent,min_dcf,status\n") == 0);
    CHECK(body.find(expect) != std::string::npos);
  }

  SUBCASE("a degenerate grid point fails in-row without aborting the sweep") {
    CliResult r = run_cli("sweep --embeddings " + f.emb + " --trials " + f.trials +
                          " --alphas 0,1 --betas 0 --gammas 0 --top-ns 0"
                          " --report-csv " + csv);
    CHECK(r.exit_code == 0);
    const std::string body = read_file(csv);
    CHECK(body.find("failed: ") != std::string::npos);
    CHECK(body.find("degenerate expansion") != std::string::npos);
    CHECK(body.find(",ok\n") != std::string::npos);
  }

  SUBCASE("top-n axis produces one row per point in declared order") {
    CliResult r = run_cli("sweep --embeddings " + f.emb + " --trials " + f.trials +
                          " --alphas 1 --betas 0.75 --top-ns 3,1,2"
                          " --report-json " + json);
    CHECK(r.exit_code == 0);
    auto j = nlohmann::json::parse(read_file(json));
    CHECK(j["grid_points"] == 3);
    REQUIRE(j["rows"].size() == 3);
    CHECK(j["rows"][0]["top_n"] == 3);
    CHECK(j["rows"][1]["top_n"] == 1);
    CHECK(j["rows"][2]["top_n"] == 2);
    for (const auto& row : j["rows"]) CHECK(row["status"] == "ok");
  }
}

TEST_CASE("cli: fusion-only sweep endpoints equal the single-system evals") {
  const auto& f = fixture();
  const std::string a = path_of("swa.csv"), b = path_of("swb.csv");
  CHECK(run_cli("score --embeddings " + f.emb + " --trials " + f.trials +
                " --output " + a).exit_code == 0);
  CHECK(run_cli("qe --embeddings " + f.emb + " --trials " + f.trials +
                " --alpha 1 --beta 0.75 --top-n 3 --output " + b).exit_code == 0);
  const std::string json = path_of("fsweep.json");
  CliResult r = run_cli("sweep --scores-a " + a + " --scores-b " + b +
                        " --lambdas 1,0.5,0 --report-json " + json);
  CHECK(r.exit_code == 0);
  auto j = nlohmann::json::parse(read_file(json));
  REQUIRE(j["rows"].size() == 3);
  const qx::EvalResult ea = qx::evaluate(qx::load_scores(a));
  const qx::EvalResult eb = qx::evaluate(qx::load_scores(b));
  CHECK(j["rows"][0]["eer_percent"].get<double>() == 100.0 * ea.eer);
  CHECK(j["rows"][2]["eer_percent"].get<double>() == 100.0 * eb.eer);
  CHECK(j["rows"][0]["min_dcf"].get<double>() == ea.min_dcf);
  CHECK(j["rows"][2]["min_dcf"].get<double>() == eb.min_dcf);
}

TEST_CASE("cli: config file supplies defaults, flags override") {
  const auto& f = fixture();
  const std::string cfg = path_of("qe.cfg");
  write_file(cfg,
             "[qe]\n"
             "alpha = 0.5\n"
             "beta = 1.0\n"
             "top-n = 2\n");
  const std::string from_cfg = path_of("cfg.scores.csv");
  const std::string from_flags = path_of("flags.scores.csv");
  CHECK(run_cli("qe --config " + cfg + " --embeddings " + f.emb + " --trials " +
                f.trials + " --output " + from_cfg).exit_code == 0);
  CHECK(run_cli("qe --alpha 0.5 --beta 1.0 --top-n 2 --embeddings " + f.emb +
                " --trials " + f.trials + " --output " + from_flags).exit_code == 0);
  CHECK(read_file(from_cfg) == read_file(from_flags));

  // the command line takes precedence over the file
  const std::string overridden = path_of("override.scores.csv");
  const std::string explicit_beta = path_of("beta2.scores.csv");
  CHECK(run_cli("qe --config " + cfg + " --beta 2.0 --embeddings " + f.emb +
                " --trials " + f.trials + " --output " + overridden).exit_code == 0);
  CHECK(run_cli("qe --alpha 0.5 --beta 2.0 --top-n 2 --embeddings " + f.emb +
                " --trials " + f.trials + " --output " + explicit_beta).exit_code == 0);
  CHECK(read_file(overridden) == read_file(explicit_beta));
}

TEST_CASE("cli: qe output is identical with and without --lazy-pairs and threads") {
  const auto& f = fixture();
  const std::string dense = path_of("dense.csv");
  const std::string lazy = path_of("lazy.csv");
  const std::string threaded = path_of("threaded.csv");
  const std::string flags = "qe --embeddings " + f.emb + " --trials " + f.trials +
                            " --alpha 0.5 --beta 1 --gamma 0.2 --top-n 4"
                            " --bidirectional --output ";
  CHECK(run_cli(flags + dense).exit_code == 0);
  CHECK(run_cli(flags + lazy + " --lazy-pairs").exit_code == 0);
  CHECK(run_cli(flags + threaded + " --threads 3").exit_code == 0);
  CHECK(read_file(dense) == read_file(lazy));
  CHECK(read_file(dense) == read_file(threaded));
}
