#pragma once

#include <string>
#include <vector>

#include "fpp/config.hpp"

namespace fpp {

// Outcome of one configured run. status mirrors the CLI exit code: 0 ok,
// 1 internal error, 2 bad usage/config, 3 statistical validity failure.
// summary_json is the run summary (also written to <output_dir>/summary.json
// whenever a run gets far enough to produce results).
struct RunOutcome {
  int status = 0;
  std::string summary_json;
  std::string error;  // single line, empty on success
};

const std::vector<std::string>& subcommand_names();
RunOutcome run_subcommand(const std::string& subcommand, const Config& cfg);

}  // namespace fpp
