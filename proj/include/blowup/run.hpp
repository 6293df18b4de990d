#pragma once

#include <filesystem>
#include <iosfwd>

#include "blowup/config.hpp"

namespace blowup {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

/// config.output_dir, else $BLOWUP_OUT_DIR, else "blowup_out".
std::filesystem::path resolve_output_dir(const ExperimentConfig& config);

/// Runs one experiment and writes report.json plus the mode's data files
/// into the output directory. Returns kExitPass when every asserted property
/// holds, kExitFailure on a failed check or a solver error (the report still
/// records it), and kExitConfig when the problem cannot be built from the
/// config. Progress and diagnostics go to `log`.
int run(const ExperimentConfig& config, std::ostream& log);

}  // namespace blowup
