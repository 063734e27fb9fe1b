#pragma once

#include "damcc/generators.hpp"
#include "damcc/lifting.hpp"
#include "damcc/training.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace damcc::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kManifestFormat = "damcc-manifest-v1";

/// Runs one command line (argv[0] is the subcommand). Returns the exit code;
/// diagnostics go to `err`, short progress notes to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Everything a `pipeline` run needs: gen -> lift -> train -> sample ->
/// baseline -> eval.
struct ExperimentConfig {
  DatasetSpec dataset{};
  LiftConfig lift{};
  TrainConfig train{};
  std::uint64_t sample_seed = 0;
  std::uint64_t baseline_seed = 0;
  std::vector<std::string> losses{"hbce", "hc", "sbce", "sc"};
};

nlohmann::json to_json(const ExperimentConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

/// Writes the experiment's artifacts under `out_dir`:
///   data/{train,val,test}/NNN.json   generated graph series
///   cc/{train,val,test}/NNN.json     lifted series
///   ckpt/                            model.json, model.bin, curve.csv
///   pred/NNN.json, baseline/NNN.json one-step predictions for each test series
///   eval/                            graph_*.csv and cc_*.json reports
///   manifest.json
void run_pipeline(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, std::ostream& out);

}  // namespace damcc::cli
