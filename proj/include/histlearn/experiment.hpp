#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "histlearn/analysis.hpp"
#include "histlearn/instances.hpp"
#include "histlearn/learners.hpp"

namespace histlearn {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr std::size_t kDefaultHorizon = 1000;
inline constexpr std::size_t kDefaultRuns = 3;

enum class Mode { Run, Ablate, Heatmap, Verify };

const char* to_string(Mode mode);
Mode parse_mode(std::string_view text);

struct OutputPaths {
  std::string regret = "regret.csv";
  std::string ablation = "ablation.csv";
  std::string heatmap_prefix = "heatmap_";  // + learner id + ".csv"
  std::string instance = "instance.csv";
};

/// A fully validated experiment: every default applied, every learner bound
/// to the instance's (T, d, range).
struct ExperimentConfig {
  int schema = kConfigSchemaVersion;
  Mode mode = Mode::Run;
  InstanceSpec instance;
  std::vector<NamedLearner> learners;
  std::size_t n_runs = kDefaultRuns;
  std::uint64_t master_seed = 0;
  std::vector<std::size_t> windows;  // ablation / heatmap grid
  std::vector<std::size_t> times;    // heatmap columns
  bool sample_actions = false;
  std::size_t threads = 1;
  OutputPaths outputs;
};

/// Parses and validates a JSON config. Throws SchemaError on malformed JSON,
/// unknown fields or wrong types, ConstraintError on values out of bounds.
ExperimentConfig parse_config(std::string_view text);

/// Canonical JSON of the resolved config (sorted keys, defaults filled in).
std::string canonical_json(const ExperimentConfig& config);
/// 16 hex digits of FNV-1a over canonical_json().
std::string config_hash(const ExperimentConfig& config);

// CSV artifacts. Each starts with "# " provenance lines, then a header row.
void write_regret_csv(std::ostream& out, const ExperimentConfig& config,
                      const std::vector<std::vector<RunResult>>& runs);
void write_ablation_csv(std::ostream& out, const ExperimentConfig& config,
                        const AblationResult& result);
void write_heatmap_csv(std::ostream& out, const ExperimentConfig& config,
                       const HeatmapResult& result);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Property checks for the configured instance (realization of run 0).
std::vector<CheckResult> verify_instance(const ExperimentConfig& config);

struct RunReport {
  std::vector<std::filesystem::path> written;
  std::vector<CheckResult> checks;
  bool ok = true;
};

/// Executes the config's mode, writing artifacts under `out_dir` and
/// progress / verify lines to `log`.
RunReport run_mode(const ExperimentConfig& config,
                   const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace histlearn
