#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sche/harness.hpp"
#include "sche/model.hpp"

namespace sche {

/// Run configuration parsed from an INI-style file with the sections
/// [model], [discretization], [study] and [output]. `#` and `;` start
/// comments. Unknown sections or keys are rejected.
struct RunConfig {
  ModelParams params;
  std::string initial_expression;

  int m_ref = 1024;
  int n_ref = 64;
  std::vector<int> levels_m = {8, 16, 32, 64, 128};
  std::vector<int> levels_n = {8, 16, 32, 64};

  StudyMode mode = StudyMode::temporal;
  int trajectories = 200;
  std::uint64_t seed = 1;
  int workers = 0;  // 0: all available cores

  std::string output_dir = ".";
  bool write_csv = true;
  bool write_gnuplot = true;
};

/// Parses `text` (from `path`, used in messages only) and validates every
/// numeric constraint. The SCHE_SEED environment variable, when set,
/// overrides the configured seed.
RunConfig parse_run_config(const std::string& text, const std::string& path);

RunConfig load_run_config(const std::string& path);

/// Assembles the study the config describes.
StudyConfig make_study_config(const RunConfig& config);

}  // namespace sche
