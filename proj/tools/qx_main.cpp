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
// qx: rescore embedding verification trials with Rocchio query expansion,
// fuse two scoring systems, and evaluate with EER / minDCF.
//
// Subcommands: score, qe, fuse, eval, sweep, synth.  Every command is
// deterministic given its flags and input files; seeds are always explicit.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qx/qx.hpp"

namespace {

using nlohmann::ordered_json;

struct GlobalOpts {
  unsigned threads = 0;  // 0 = hardware default
  bool quiet = false;
};

void print_warnings(const GlobalOpts& g, const std::vector<std::string>& warnings) {
  if (g.quiet) return;
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

qx::Format resolve_format(const std::string& path, const std::string& flag) {
  if (flag == "csv") return qx::Format::csv;
  if (flag == "jsonl") return qx::Format::jsonl;
  if (flag == "binary") return qx::Format::binary;
  if (flag != "auto") throw qx::Error("unknown format '" + flag + "'");
  auto fmt = qx::format_from_extension(path);
  if (!fmt)
    throw qx::Error("cannot infer format of '" + path +
                    "' from its extension; pass --format {csv,jsonl,binary}");
  return *fmt;
}

qx::EmbeddingSet load_set(const std::string& path, const std::string& format,
                          bool normalize) {
  qx::EmbeddingSet set = qx::load_embeddings(path, resolve_format(path, format));
  return normalize ? qx::l2_normalize(set) : set;
}

qx::NormMode parse_norm_mode(const std::string& s) {
  if (s == "none") return qx::NormMode::none;
  if (s == "z") return qx::NormMode::z_norm;
  if (s == "minmax") return qx::NormMode::min_max;
  throw qx::Error("unknown normalization mode '" + s + "' (none, z, minmax)");
}

qx::BidiRule parse_bidi_rule(const std::string& s) {
  if (s == "mean_of_directions") return qx::BidiRule::mean_of_directions;
  if (s == "expanded_vs_expanded") return qx::BidiRule::expanded_vs_expanded;
  throw qx::Error("unknown bidi rule '" + s +
                  "' (mean_of_directions, expanded_vs_expanded)");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t pos = s.find(',', start);
    if (pos == std::string::npos) pos = s.size();
    std::string item = s.substr(start, pos - start);
    while (!item.empty() && (item.front() == ' ' || item.front() == '\t'))
      item.erase(item.begin());
    while (!item.empty() && (item.back() == ' ' || item.back() == '\t'))
      item.pop_back();
    if (!item.empty()) parts.push_back(item);
    start = pos + 1;
  }
  return parts;
}

std::vector<double> parse_double_list(const std::string& s, const char* flag) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size())
      throw qx::Error(std::string(flag) + ": malformed number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<std::uint32_t> parse_u32_list(const std::string& s, const char* flag) {
  std::vector<std::uint32_t> out;
  for (const auto& item : split_list(s)) {
    std::uint32_t v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size())
      throw qx::Error(std::string(flag) + ": malformed integer '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::string fmt_fixed3(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3f", x);
  return buf;
}

std::string fmt_g6(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw qx::Error("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw qx::Error("write to '" + path + "' failed");
}

ordered_json dcf_params_json(const qx::DcfParams& p) {
  return ordered_json{{"c_miss", p.c_miss}, {"c_fa", p.c_fa}, {"p_target", p.p_target}};
}

ordered_json eval_report_json(const std::string& system, const qx::EvalResult& ev,
                              const qx::DcfParams& dcf) {
  ordered_json report;
  report["system"] = system;
  report["n_target"] = ev.n_target;
  report["n_nontarget"] = ev.n_nontarget;
  report["eer_percent"] = 100.0 * ev.eer;
  report["eer_threshold"] = ev.eer_threshold;
  report["min_dcf_normalized"] = ev.min_dcf;
  report["min_dcf_unnormalized"] = ev.min_dcf_unnormalized;
  report["min_dcf_threshold"] = ev.min_dcf_threshold;
  report["dcf_params"] = dcf_params_json(dcf);
  return report;
}

void print_eval_line(const std::string& system, const qx::EvalResult& ev) {
  std::cout << "system=" << system << " n_target=" << ev.n_target
            << " n_nontarget=" << ev.n_nontarget
            << " eer_percent=" << fmt_fixed3(100.0 * ev.eer)
            << " eer_threshold=" << fmt_g6(ev.eer_threshold)
            << " min_dcf=" << fmt_fixed3(ev.min_dcf)
            << " min_dcf_threshold=" << fmt_g6(ev.min_dcf_threshold) << "\n";
}

// --- score ------------------------------------------------------------------

struct ScoreOpts {
  std::string embeddings, trials, output;
  std::string format = "auto";
  bool normalize = true;
};

void run_score(const GlobalOpts& g, const ScoreOpts& o) {
  qx::EmbeddingSet set = load_set(o.embeddings, o.format, o.normalize);
  qx::TrialList trials = qx::load_trials(o.trials);
  std::vector<std::string> warnings;
  qx::ScoreSet scores = qx::score_trials(set, trials, &warnings);
  print_warnings(g, warnings);
  qx::save_scores(o.output, scores);
}

// --- qe ---------------------------------------------------------------------

struct QeOpts {
  std::string embeddings, trials, output;
  std::string format = "auto";
  bool normalize = true;
  bool lazy_pairs = false;
  double alpha = 1.0, beta = 0.0, gamma = 0.0;
  std::uint32_t top_n = 0;
  bool bidirectional = false;
  std::string bidi_rule = "mean_of_directions";
  bool exclude_trial_partner = false;
};

qx::QEParams qe_params_from(const QeOpts& o) {
  qx::QEParams p;
  p.alpha = o.alpha;
  p.beta = o.beta;
  p.gamma = o.gamma;
  p.top_n = o.top_n;
  p.direction = o.bidirectional ? qx::Direction::bidirectional
                                : qx::Direction::one_sided;
  p.bidi_rule = parse_bidi_rule(o.bidi_rule);
  p.exclude_trial_partner = o.exclude_trial_partner;
  qx::check_params(p);
  return p;
}

void run_qe(const GlobalOpts& g, const QeOpts& o) {
  qx::EmbeddingSet set = load_set(o.embeddings, o.format, o.normalize);
  qx::TrialList trials = qx::load_trials(o.trials);
  qx::QEParams params = qe_params_from(o);
  if (set.size() >= 1 && params.top_n > set.size() - 1)
    throw qx::Error("--top-n (" + std::to_string(params.top_n) +
                    ") exceeds N-1 = " + std::to_string(set.size() - 1));
  qx::AllPairsScores pairs = o.lazy_pairs
                                 ? qx::AllPairsScores::lazy(set)
                                 : qx::AllPairsScores::compute(set, g.threads);
  qx::RankingCache rankings(set, pairs);
  std::vector<std::string> warnings;
  qx::ScoreSet scores =
      qx::qe_score_all(set, rankings, trials, params, g.threads, &warnings);
  print_warnings(g, warnings);
  qx::save_scores(o.output, scores);
}

// --- fuse -------------------------------------------------------------------

struct FuseOpts {
  std::string scores_a, scores_b, output;
  double lambda = 0.5;
  std::string normalize = "none";
};

void run_fuse(const FuseOpts& o) {
  qx::ScoreSet a = qx::load_scores(o.scores_a);
  qx::ScoreSet b = qx::load_scores(o.scores_b);
  qx::FusionParams params{o.lambda, parse_norm_mode(o.normalize)};
  qx::save_scores(o.output, qx::fuse(a, b, params));
}

// --- eval -------------------------------------------------------------------

struct EvalOpts {
  std::string scores, report, det_csv, system;
  qx::DcfParams dcf;
};

void run_eval(const EvalOpts& o) {
  qx::ScoreSet scores = qx::load_scores(o.scores, o.system);
  qx::EvalResult ev = qx::evaluate(scores, o.dcf);
  print_eval_line(scores.system, ev);
  if (!o.report.empty())
    write_text_file(o.report, eval_report_json(scores.system, ev, o.dcf).dump(2) + "\n");
  if (!o.det_csv.empty()) {
    qx::DetCurve curve = qx::det_curve(scores);
    std::string csv = "threshold,p_miss,p_fa\n";
    for (const auto& p : curve.points)
      csv += fmt_g6(p.threshold) + "," + fmt_g6(p.p_miss) + "," + fmt_g6(p.p_fa) + "\n";
    write_text_file(o.det_csv, csv);
  }
}

// --- synth ------------------------------------------------------------------

struct SynthOpts {
  qx::CohortSpec spec;
  std::size_t n_target = 100;
  std::size_t n_nontarget = 100;
  std::optional<std::uint64_t> trial_seed;  // defaults to seed + 1
  std::string embeddings_out, trials_out;
  std::string format = "auto";
};

void run_synth(const SynthOpts& o) {
  qx::EmbeddingSet set = qx::generate(o.spec);
  qx::save_embeddings(o.embeddings_out, set,
                      resolve_format(o.embeddings_out, o.format));
  if (o.n_target + o.n_nontarget > 0) {
    if (o.trials_out.empty())
      throw qx::Error("--trials-out is required when trials are requested");
    const std::uint64_t seed = o.trial_seed ? *o.trial_seed : o.spec.seed + 1;
    qx::save_trials(o.trials_out,
                    qx::make_trials(set, o.n_target, o.n_nontarget, seed));
  }
}

// --- sweep ------------------------------------------------------------------

struct SweepOpts {
  std::string embeddings, trials, scores_a, scores_b;
  std::string format = "auto";
  bool normalize_embeddings = true;
  bool lazy_pairs = false;
  std::string alphas, betas, gammas, top_ns, lambdas;
  bool bidirectional = false;
  std::string bidi_rule = "mean_of_directions";
  bool exclude_trial_partner = false;
  std::string fusion_normalize = "none";
  qx::DcfParams dcf;
  std::string report_csv, report_json;
};

struct SweepRow {
  double alpha = 1.0, beta = 0.0, gamma = 0.0;
  std::uint32_t top_n = 0;
  std::optional<double> lambda;
  bool ok = false;
  std::string error;
  qx::EvalResult ev{};
};

void run_sweep(const GlobalOpts& g, const SweepOpts& o) {
  const bool qe_mode = !o.embeddings.empty();
  std::vector<double> alphas = parse_double_list(o.alphas, "--alphas");
  std::vector<double> betas = parse_double_list(o.betas, "--betas");
  std::vector<double> gammas = parse_double_list(o.gammas, "--gammas");
  std::vector<std::uint32_t> top_ns = parse_u32_list(o.top_ns, "--top-ns");
  std::vector<double> lambdas = parse_double_list(o.lambdas, "--lambdas");
  const bool lambda_mode = !lambdas.empty();

  if (!qe_mode && (!alphas.empty() || !betas.empty() || !gammas.empty() ||
                   !top_ns.empty()))
    throw qx::Error("QE axes (--alphas/--betas/--gammas/--top-ns) need --embeddings");
  if (!qe_mode && !lambda_mode)
    throw qx::Error("nothing to sweep: pass --embeddings with QE axes and/or --lambdas");
  if (qe_mode && !o.scores_a.empty())
    throw qx::Error("--scores-a conflicts with --embeddings (the first system is computed)");
  if (lambda_mode && o.scores_b.empty())
    throw qx::Error("--lambdas needs --scores-b (the second system)");
  if (!qe_mode && lambda_mode && o.scores_a.empty())
    throw qx::Error("a fusion-only sweep needs --scores-a and --scores-b");
  if (qe_mode && o.trials.empty())
    throw qx::Error("--embeddings needs --trials");

  if (alphas.empty()) alphas = {1.0};
  if (betas.empty()) betas = {0.0};
  if (gammas.empty()) gammas = {0.0};
  if (top_ns.empty()) top_ns = {0};
  if (o.report_csv.empty() && o.report_json.empty())
    throw qx::Error("no report requested: pass --report-csv and/or --report-json");

  const std::size_t n_points = alphas.size() * betas.size() * gammas.size() *
                               top_ns.size() * (lambda_mode ? lambdas.size() : 1);
  if (!g.quiet) std::cerr << "sweep: " << n_points << " grid points\n";

  // Shared state, computed once.
  std::optional<qx::EmbeddingSet> set;
  std::optional<qx::AllPairsScores> pairs;
  std::optional<qx::RankingCache> rankings;
  qx::TrialList trials;
  qx::ScoreSet file_a, file_b;
  if (qe_mode) {
    set.emplace(load_set(o.embeddings, o.format, o.normalize_embeddings));
    trials = qx::load_trials(o.trials);
    pairs.emplace(o.lazy_pairs ? qx::AllPairsScores::lazy(*set)
                               : qx::AllPairsScores::compute(*set, g.threads));
    rankings.emplace(*set, *pairs);
  } else {
    file_a = qx::load_scores(o.scores_a);
  }
  if (!o.scores_b.empty()) file_b = qx::load_scores(o.scores_b);
  const qx::NormMode fusion_norm = parse_norm_mode(o.fusion_normalize);
  const qx::BidiRule bidi = parse_bidi_rule(o.bidi_rule);

  std::vector<SweepRow> rows;
  rows.reserve(n_points);
  for (double a : alphas)
    for (double b : betas)
      for (double gm : gammas)
        for (std::uint32_t n : top_ns) {
          // The first system of this grid point; shared across lambdas.
          std::optional<qx::ScoreSet> system_a;
          std::string point_error;
          if (qe_mode) {
            qx::QEParams p;
            p.alpha = a;
            p.beta = b;
            p.gamma = gm;
            p.top_n = n;
            p.direction = o.bidirectional ? qx::Direction::bidirectional
                                          : qx::Direction::one_sided;
            p.bidi_rule = bidi;
            p.exclude_trial_partner = o.exclude_trial_partner;
            try {
              system_a = qx::qe_score_all(*set, *rankings, trials, p, g.threads);
            } catch (const qx::Error& e) {
              point_error = e.what();
            }
          } else {
            system_a = file_a;
          }

          auto eval_point = [&](std::optional<double> lambda) {
            SweepRow row;
            row.alpha = a;
            row.beta = b;
            row.gamma = gm;
            row.top_n = n;
            row.lambda = lambda;
            if (!system_a) {
              row.error = point_error;
              return row;
            }
            try {
              qx::ScoreSet final_scores = *system_a;
              if (lambda) {
                qx::FusionParams fp{*lambda, fusion_norm};
                final_scores = qx::fuse(*system_a, file_b, fp);
              }
              row.ev = qx::evaluate(final_scores, o.dcf);
              row.ok = true;
            } catch (const qx::Error& e) {
              row.error = e.what();
            }
            return row;
          };

          if (lambda_mode)
            for (double l : lambdas) rows.push_back(eval_point(l));
          else
            rows.push_back(eval_point(std::nullopt));
        }

  if (!o.report_csv.empty()) {
    std::string csv;
    if (qe_mode) csv += "alpha,beta,gamma,top_n,";
    if (lambda_mode) csv += "lambda,";
    csv += "eer_percent,min_dcf,status\n";
    for (const SweepRow& r : rows) {
      std::string line;
      if (qe_mode)
        line += fmt_g6(r.alpha) + "," + fmt_g6(r.beta) + "," + fmt_g6(r.gamma) +
                "," + std::to_string(r.top_n) + ",";
      if (lambda_mode) line += fmt_g6(*r.lambda) + ",";
      if (r.ok)
        line += fmt_fixed3(100.0 * r.ev.eer) + "," + fmt_g6(r.ev.min_dcf) + ",ok";
      else {
        std::string msg = r.error;
        for (char& c : msg)
          if (c == ',' || c == '\n') c = ';';
        line += ",,failed: " + msg;
      }
      csv += line + "\n";
    }
    write_text_file(o.report_csv, csv);
  }

  if (!o.report_json.empty()) {
    ordered_json report;
    report["grid_points"] = n_points;
    report["dcf_params"] = dcf_params_json(o.dcf);
    ordered_json jrows = ordered_json::array();
    for (const SweepRow& r : rows) {
      ordered_json jr;
      if (qe_mode) {
        jr["alpha"] = r.alpha;
        jr["beta"] = r.beta;
        jr["gamma"] = r.gamma;
        jr["top_n"] = r.top_n;
      }
      if (lambda_mode) jr["lambda"] = *r.lambda;
      jr["status"] = r.ok ? "ok" : "failed";
      if (r.ok) {
        jr["eer_percent"] = 100.0 * r.ev.eer;
        jr["eer_threshold"] = r.ev.eer_threshold;
        jr["min_dcf"] = r.ev.min_dcf;
        jr["min_dcf_unnormalized"] = r.ev.min_dcf_unnormalized;
        jr["min_dcf_threshold"] = r.ev.min_dcf_threshold;
      } else {
        jr["error"] = r.error;
      }
      jrows.push_back(std::move(jr));
    }
    report["rows"] = std::move(jrows);
    write_text_file(o.report_json, report.dump(2) + "\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qx: query-expansion rescoring, fusion and EER/minDCF "
               "evaluation for embedding verification trials"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a 'key = value' file; "
                                 "command-line flags take precedence");

  GlobalOpts g;
  app.add_option("--threads", g.threads,
                 "Worker threads (0 = hardware default)")
      ->capture_default_str();
  app.add_flag("--quiet", g.quiet, "Suppress warnings and progress output");

  auto add_format_flag = [](CLI::App* cmd, std::string& var) {
    cmd->add_option("--format", var,
                    "Embedding file format: auto, csv, jsonl, binary")
        ->capture_default_str();
  };
  auto add_dcf_flags = [](CLI::App* cmd, qx::DcfParams& dcf) {
    cmd->add_option("--c-miss", dcf.c_miss, "Miss cost")->capture_default_str();
    cmd->add_option("--c-fa", dcf.c_fa, "False-alarm cost")->capture_default_str();
    cmd->add_option("--p-target", dcf.p_target, "Target prior")
        ->capture_default_str();
  };

  // score
  ScoreOpts score_opts;
  CLI::App* score = app.add_subcommand(
      "score", "Score a trial list with baseline cosine similarity");
  score->fallthrough();
  score->add_option("--embeddings", score_opts.embeddings, "Embedding file")
      ->required();
  score->add_option("--trials", score_opts.trials, "Trial list")->required();
  score->add_option("--output", score_opts.output, "Output score file")
      ->required();
  add_format_flag(score, score_opts.format);
  score->add_flag("--normalize-embeddings,!--no-normalize-embeddings",
                  score_opts.normalize,
                  "L2-normalize embeddings after loading (default: on)");
  score->callback([&] { run_score(g, score_opts); });

  // qe
  QeOpts qe_opts;
  CLI::App* qe = app.add_subcommand(
      "qe", "Rescore a trial list with Rocchio query expansion");
  qe->fallthrough();
  qe->add_option("--embeddings", qe_opts.embeddings, "Embedding file")->required();
  qe->add_option("--trials", qe_opts.trials, "Trial list")->required();
  qe->add_option("--output", qe_opts.output, "Output score file")->required();
  add_format_flag(qe, qe_opts.format);
  qe->add_flag("--normalize-embeddings,!--no-normalize-embeddings",
               qe_opts.normalize,
               "L2-normalize embeddings after loading (default: on)");
  qe->add_flag("--lazy-pairs", qe_opts.lazy_pairs,
               "Recompute pair scores on demand instead of storing the "
               "O(N^2/2) triangle");
  qe->add_option("--alpha", qe_opts.alpha, "Weight of the original query")
      ->capture_default_str();
  qe->add_option("--beta", qe_opts.beta, "Weight of the relevant centroid")
      ->capture_default_str();
  qe->add_option("--gamma", qe_opts.gamma, "Weight of the non-relevant centroid")
      ->capture_default_str();
  qe->add_option("--top-n", qe_opts.top_n, "Size of the pseudo-relevant set")
      ->capture_default_str();
  qe->add_flag("--bidirectional", qe_opts.bidirectional,
               "Expand both sides of each trial");
  qe->add_option("--bidi-rule", qe_opts.bidi_rule,
                 "mean_of_directions or expanded_vs_expanded")
      ->capture_default_str();
  qe->add_flag("--exclude-trial-partner", qe_opts.exclude_trial_partner,
               "Drop the other trial side from the neighbor ranking");
  qe->callback([&] { run_qe(g, qe_opts); });

  // fuse
  FuseOpts fuse_opts;
  CLI::App* fuse = app.add_subcommand(
      "fuse", "Linearly combine two score files: lambda*A + (1-lambda)*B");
  fuse->fallthrough();
  fuse->add_option("--scores-a", fuse_opts.scores_a, "First score file")->required();
  fuse->add_option("--scores-b", fuse_opts.scores_b, "Second score file")->required();
  fuse->add_option("--lambda", fuse_opts.lambda, "Weight of the first system")
      ->required();
  fuse->add_option("--normalize", fuse_opts.normalize,
                   "Per-system normalization: none, z, minmax")
      ->capture_default_str();
  fuse->add_option("--output", fuse_opts.output, "Output score file")->required();
  fuse->callback([&] { run_fuse(fuse_opts); });

  // eval
  EvalOpts eval_opts;
  CLI::App* eval = app.add_subcommand(
      "eval", "Compute EER and minimum normalized detection cost");
  eval->fallthrough();
  eval->add_option("--scores", eval_opts.scores, "Labeled score file")->required();
  eval->add_option("--report", eval_opts.report, "JSON report path");
  eval->add_option("--det-csv", eval_opts.det_csv,
                   "Write the detection trade-off points as CSV");
  eval->add_option("--system", eval_opts.system,
                   "System name used in the report (default: score file path)");
  add_dcf_flags(eval, eval_opts.dcf);
  eval->callback([&] { run_eval(eval_opts); });

  // sweep
  SweepOpts sweep_opts;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Evaluate a grid of QE parameters and/or fusion weights");
  sweep->fallthrough();
  sweep->add_option("--embeddings", sweep_opts.embeddings,
                    "Embedding file (enables the QE axes)");
  sweep->add_option("--trials", sweep_opts.trials, "Labeled trial list");
  sweep->add_option("--scores-a", sweep_opts.scores_a,
                    "First score file (fusion-only sweep)");
  sweep->add_option("--scores-b", sweep_opts.scores_b,
                    "Second score file (needed with --lambdas)");
  add_format_flag(sweep, sweep_opts.format);
  sweep->add_flag("--normalize-embeddings,!--no-normalize-embeddings",
                  sweep_opts.normalize_embeddings,
                  "L2-normalize embeddings after loading (default: on)");
  sweep->add_flag("--lazy-pairs", sweep_opts.lazy_pairs,
                  "Recompute pair scores on demand");
  sweep->add_option("--alphas", sweep_opts.alphas, "Comma-separated alpha grid");
  sweep->add_option("--betas", sweep_opts.betas, "Comma-separated beta grid");
  sweep->add_option("--gammas", sweep_opts.gammas, "Comma-separated gamma grid");
  sweep->add_option("--top-ns", sweep_opts.top_ns, "Comma-separated top-n grid");
  sweep->add_option("--lambdas", sweep_opts.lambdas, "Comma-separated lambda grid");
  sweep->add_flag("--bidirectional", sweep_opts.bidirectional,
                  "Expand both sides of each trial");
  sweep->add_option("--bidi-rule", sweep_opts.bidi_rule,
                    "mean_of_directions or expanded_vs_expanded")
      ->capture_default_str();
  sweep->add_flag("--exclude-trial-partner", sweep_opts.exclude_trial_partner,
                  "Drop the other trial side from the neighbor ranking");
  sweep->add_option("--normalize", sweep_opts.fusion_normalize,
                    "Per-system normalization before fusing: none, z, minmax")
      ->capture_default_str();
  add_dcf_flags(sweep, sweep_opts.dcf);
  sweep->add_option("--report-csv", sweep_opts.report_csv, "CSV report path");
  sweep->add_option("--report-json", sweep_opts.report_json, "JSON report path");
  sweep->callback([&] { run_sweep(g, sweep_opts); });

  // synth
  SynthOpts synth_opts;
  std::uint64_t trial_seed_flag = 0;
  CLI::App* synth = app.add_subcommand(
      "synth", "Generate a seeded synthetic speaker cohort and trial list");
  synth->fallthrough();
  synth->add_option("--n-speakers", synth_opts.spec.n_speakers, "Speakers")
      ->capture_default_str();
  synth->add_option("--utts-per-speaker", synth_opts.spec.utts_per_speaker,
                    "Utterances per speaker")
      ->capture_default_str();
  synth->add_option("--dimension", synth_opts.spec.dimension,
                    "Embedding dimension")
      ->capture_default_str();
  synth->add_option("--between-std", synth_opts.spec.between_std,
                    "Std of speaker means")
      ->capture_default_str();
  synth->add_option("--within-std", synth_opts.spec.within_std,
                    "Std of utterance noise around the speaker mean")
      ->capture_default_str();
  synth->add_option("--seed", synth_opts.spec.seed, "Generator seed")
      ->capture_default_str();
  synth->add_option("--n-target", synth_opts.n_target, "Target trials to sample")
      ->capture_default_str();
  synth->add_option("--n-nontarget", synth_opts.n_nontarget,
                    "Nontarget trials to sample")
      ->capture_default_str();
  CLI::Option* ts = synth->add_option("--trial-seed", trial_seed_flag,
                                      "Trial sampling seed (default: seed + 1)");
  synth->add_option("--embeddings-out", synth_opts.embeddings_out,
                    "Embedding output path")
      ->required();
  synth->add_option("--trials-out", synth_opts.trials_out, "Trial list output path");
  add_format_flag(synth, synth_opts.format);
  synth->callback([&] {
    if (ts->count()) synth_opts.trial_seed = trial_seed_flag;
    run_synth(synth_opts);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
