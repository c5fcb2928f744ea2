// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator
//
// Command-line front end over the shared-library C interface.

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "emchan.h"

namespace {

struct Options {
  std::string config;
  std::string output_dir;
  std::vector<std::string> overrides;
};

int fail(emchan_status status) {
  std::fprintf(stderr, "emchan: error: %s\n", emchan_last_error());
  return static_cast<int>(status);
}

int run_subcommand(const Options& opt, const std::string& name) {
  emchan_scenario* sc = nullptr;
  emchan_status st = emchan_scenario_load(opt.config.c_str(), &sc);
  if (st != EMCHAN_OK) return fail(st);

  for (const auto& kv : opt.overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "emchan: error: override '%s' must look like key=value\n",
                   kv.c_str());
      emchan_scenario_free(sc);
      return 1;
    }
    st = emchan_scenario_set(sc, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    if (st != EMCHAN_OK) {
      emchan_scenario_free(sc);
      return fail(st);
    }
  }

  char* outputs = nullptr;
  st = emchan_run(sc, name.c_str(), opt.output_dir.empty() ? nullptr : opt.output_dir.c_str(),
                  &outputs);
  if (st == EMCHAN_OK && outputs != nullptr) {
    std::printf("%s\n", outputs);
  }
  emchan_string_free(outputs);
  emchan_scenario_free(sc);
  return st == EMCHAN_OK ? 0 : fail(st);
}

int run_validate(const Options& opt) {
  emchan_scenario* sc = nullptr;
  emchan_status st = emchan_scenario_load(opt.config.c_str(), &sc);
  if (st != EMCHAN_OK) return fail(st);
  for (const auto& kv : opt.overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "emchan: error: override '%s' must look like key=value\n",
                   kv.c_str());
      emchan_scenario_free(sc);
      return 1;
    }
    st = emchan_scenario_set(sc, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    if (st != EMCHAN_OK) {
      emchan_scenario_free(sc);
      return fail(st);
    }
  }
  char* report = nullptr;
  st = emchan_scenario_validate(sc, &report);
  if (st == EMCHAN_OK && report != nullptr) std::printf("%s", report);
  emchan_string_free(report);
  emchan_scenario_free(sc);
  return st == EMCHAN_OK ? 0 : fail(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("emchan ") + emchan_version() +
               " - continuous-space electromagnetic channel simulator"};
  app.require_subcommand(1);

  Options opt;
  const std::vector<std::string> names = {"acf",         "ccf",     "capacity-su",
                                          "capacity-mu", "dof",     "pattern",
                                          "sweep-svd",   "scene-dump"};
  const std::vector<std::string> descriptions = {
      "temporal autocorrelation of the channel",
      "spatial cross-correlation at the receiver",
      "single-user water-filling capacity and DoF",
      "multi-user Monte-Carlo capacity",
      "degrees of freedom versus transmit power",
      "radiation pattern of the optimized current",
      "signal error and transmit power versus expansion order",
      "draw and save one environment realization"};

  std::vector<CLI::App*> subs;
  for (size_t i = 0; i < names.size(); ++i) {
    CLI::App* sub = app.add_subcommand(names[i], descriptions[i]);
    sub->add_option("-c,--config", opt.config, "scenario YAML file")->required();
    sub->add_option("-o,--out", opt.output_dir, "output directory override");
    sub->add_option("-s,--set", opt.overrides,
                    "config override key=value (repeatable, value parsed as YAML)");
    subs.push_back(sub);
  }
  CLI::App* val = app.add_subcommand("validate", "check a scenario without running it");
  val->add_option("-c,--config", opt.config, "scenario YAML file")->required();
  val->add_option("-s,--set", opt.overrides, "config override key=value (repeatable)");

  CLI11_PARSE(app, argc, argv);

  if (val->parsed()) return run_validate(opt);
  for (size_t i = 0; i < names.size(); ++i) {
    if (subs[i]->parsed()) return run_subcommand(opt, names[i]);
  }
  return 1;
}
