#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dainr/cli/commands.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::string dataset;
  std::string recon;
  std::string method;
  long long seed = -1;
  int spokes = 0;
  int iters = 0;
  bool force = false;
  std::vector<std::string> rois;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "config file (key = value lines)");
  cmd->add_option("--out", f.out, "output directory")->required();
  cmd->add_option("--seed", f.seed, "overrides seed");
  cmd->add_flag("--force", f.force, "overwrite a non-empty output directory");
  cmd->add_option("--set", f.sets, "overrides any config key, key=value (repeatable)");
}

dainr::cli::Invocation resolve(const Flags& f) {
  dainr::cli::Invocation inv;
  if (!f.config.empty()) inv.config.load(f.config);
  for (const auto& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw dainr::InvalidArgument("--set expects key=value, got '" + kv + "'");
    inv.config.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (f.seed >= 0) inv.config.set("seed", std::to_string(f.seed));
  if (!f.method.empty()) inv.config.set("method", f.method);
  if (f.spokes > 0) inv.config.set("sim.spokes", std::to_string(f.spokes));
  if (f.iters > 0) inv.config.set("train.iterations", std::to_string(f.iters));
  if (!f.dataset.empty()) inv.config.set("dataset", f.dataset);
  if (!f.recon.empty()) inv.config.set("recon", f.recon);
  for (const auto& r : f.rois) {
    const auto eq = r.find('=');
    if (eq == std::string::npos || eq == 0) throw dainr::InvalidArgument("--roi expects name=path, got '" + r + "'");
    inv.rois[r.substr(0, eq)] = r.substr(eq + 1);
  }
  inv.out = f.out;
  inv.force = f.force;
  return inv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic MRI reconstruction with deformation-aware implicit neural representations"};
  app.require_subcommand(1);
  Flags f;

  auto* simulate = app.add_subcommand("simulate", "write a phantom dataset (ground truth, coil maps, k-space)");
  add_common(simulate, f);
  simulate->add_option("--spokes", f.spokes, "overrides sim.spokes");

  auto* reconstruct = app.add_subcommand("reconstruct", "reconstruct a dataset with dainr, hashinr or zerofill");
  add_common(reconstruct, f);
  reconstruct->add_option("--dataset", f.dataset, "dataset directory");
  reconstruct->add_option("--method", f.method, "overrides method");
  reconstruct->add_option("--iters", f.iters, "overrides train.iterations");

  auto* interpolate = app.add_subcommand("interpolate", "reconstruct with a spatial or temporal interpolation protocol");
  add_common(interpolate, f);
  interpolate->add_option("--dataset", f.dataset, "dataset directory");
  interpolate->add_option("--method", f.method, "overrides method");
  interpolate->add_option("--iters", f.iters, "overrides train.iterations");

  auto* evaluate = app.add_subcommand("evaluate", "frame-wise PSNR/SSIM and ROI curves of a reconstruction");
  add_common(evaluate, f);
  evaluate->add_option("--dataset", f.dataset, "dataset directory");
  evaluate->add_option("--recon", f.recon, "reconstruction directory");
  evaluate->add_option("--roi", f.rois, "extra ROI mask, name=path (repeatable)");

  app.footer([] {
    std::string text = "Config keys (default):\n";
    for (const auto& k : dainr::cli::config_keys())
      text += "  " + k.name + " (" + (k.default_value.empty() ? "unset" : k.default_value) + "): " + k.help + "\n";
    return text;
  }());

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    auto inv = resolve(f);
    if (simulate->parsed()) dainr::cli::cmd_simulate(inv);
    if (reconstruct->parsed()) dainr::cli::cmd_reconstruct(inv);
    if (interpolate->parsed()) dainr::cli::cmd_reconstruct(inv, true);
    if (evaluate->parsed()) dainr::cli::cmd_evaluate(inv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
