/* Copyright 2026 The sddkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// sddkit: ingest | stats | aim | eval. Data goes to files under --out,
// warnings and errors to stderr. Exit status is 0 on success, 1 on error.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sddkit/commands.hpp"

namespace {

void print_diagnostics(const sddkit::Diagnostics& diag) {
  for (const auto& m : diag.messages) std::cerr << "warning: " << m << "\n";
}

std::pair<std::string, std::string> parse_pair(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos || comma == 0 || comma + 1 == s.size()) {
    throw sddkit::ConfigError("--pair expects I,J");
  }
  return {s.substr(0, comma), s.substr(comma + 1)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trajectory dataset audit and interaction measures"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run configuration (JSON)")->required();
    sub->add_option("--out", out_dir, "Output directory (default: config store / output)");
  };

  auto* ingest = app.add_subcommand("ingest", "Parse raw annotations into a trajectory store");
  add_common(ingest);

  auto* stats = app.add_subcommand("stats", "Lost-annotation, class and overlap reports");
  add_common(stats);

  auto* aim = app.add_subcommand("aim", "Export per-frame MI, rho and AIM series");
  add_common(aim);
  std::string pair_arg, video_arg;
  std::size_t top_k = 5;
  std::vector<double> sweep_delta;
  std::vector<int> sweep_n;
  auto* pair_opt = aim->add_option("--pair", pair_arg, "Track ids I,J (needs --video)");
  aim->add_option("--video", video_arg, "Video as scene/video");
  aim->add_option("--top-k", top_k, "Export the k pairs with the largest final AIM")
      ->excludes(pair_opt);
  aim->add_option("--sweep-delta", sweep_delta, "Decay values to sweep")->delimiter(',');
  aim->add_option("--sweep-n", sweep_n, "Kinematic windows N to sweep")->delimiter(',');

  auto* eval = app.add_subcommand("eval", "ADE/FDE of a predictor per lost-annotation policy");
  add_common(eval);
  std::string predictor = "cv";
  std::vector<std::string> policies;
  eval->add_option("--predictor", predictor, "'cv' or a JSON-lines predictions file");
  eval->add_option("--lost-policy", policies,
                   "filter_keep_first, filter_keep_all or keep_lost (repeatable)")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, std::cerr, std::cerr) == 0 ? 0 : 1;
  }

  sddkit::Diagnostics diag;
  try {
    sddkit::RunConfig cfg = sddkit::load_run_config(config_path);
    std::filesystem::path out(out_dir);
    if (out.empty()) out = ingest->parsed() ? cfg.store : cfg.output;
    if (out.empty()) throw sddkit::ConfigError("no --out given and the config sets no default");
    if (ingest->parsed()) {
      sddkit::cmd_ingest(cfg, out, &diag);
    } else if (stats->parsed()) {
      sddkit::cmd_stats(cfg, out, &diag);
    } else if (aim->parsed()) {
      sddkit::AimOptions opts;
      if (!pair_arg.empty()) opts.pair = parse_pair(pair_arg);
      if (!video_arg.empty()) opts.video = video_arg;
      opts.top_k = top_k;
      opts.sweep_delta = sweep_delta;
      opts.sweep_n = sweep_n;
      sddkit::cmd_aim(cfg, opts, out, &diag);
    } else if (eval->parsed()) {
      sddkit::EvalOptions opts;
      opts.predictor = predictor;
      for (const auto& p : policies) opts.policies.push_back(sddkit::parse_lost_policy(p));
      sddkit::cmd_eval(cfg, opts, out, &diag);
    }
  } catch (const std::exception& e) {
    print_diagnostics(diag);
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  print_diagnostics(diag);
  return 0;
}
