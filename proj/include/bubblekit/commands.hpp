#pragma once

#include <ostream>

#include <json.hpp>

#include "bubblekit/config.hpp"

namespace bubblekit {

enum ExitCode : int {
    kExitOk = 0,
    kExitError = 1,
    kExitInvalid = 2,
    kExitQuadrature = 3,
    kExitBox = 4,
    kExitSuite = 5,
};

// Each command writes report.json (and CSV files where noted) under
// config.output_dir, logs progress to `log` and returns its exit code.
int cmd_validate(const RunConfig& config, std::ostream& log);
int cmd_constants(const RunConfig& config, std::ostream& log);
int cmd_reduce(const RunConfig& config, std::ostream& log);   // also state.json, cloud.json, trace.csv
int cmd_verify(const RunConfig& config, std::ostream& log);   // also residual_decay.csv, interaction.csv, expansions.csv

// Report bodies, exposed for the acceptance harness.
nlohmann::json constants_report(const RunConfig& config);
nlohmann::json verify_report(const RunConfig& config, std::ostream& log);

}  // namespace bubblekit
