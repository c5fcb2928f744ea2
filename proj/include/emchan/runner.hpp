// SPDX-License-Identifier: Apache-2.0
//
// emchan - continuous-space electromagnetic channel simulator

#pragma once

#include <string>
#include <vector>

#include "emchan/scenario.hpp"

namespace emchan::runner {

inline constexpr const char* kVersion = "0.1.0";

/// Valid subcommands for run().
bool known_subcommand(const std::string& name);
std::vector<std::string> subcommand_names();

struct RunOutcome {
  std::vector<std::string> outputs;  // files written, manifest last
};

/// Execute one subcommand. Results land in the scenario's output directory
/// (created if needed) as CSV tables with the resolved config embedded in
/// the header, plus a JSON run manifest. Deterministic for a fixed
/// (config, seed): reruns produce byte-identical files.
RunOutcome run(const cfg::Scenario& sc, const std::string& subcommand);

}  // namespace emchan::runner
