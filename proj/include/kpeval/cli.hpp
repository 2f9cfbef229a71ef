#pragma once

/// \file cli.hpp
/// \brief Run configuration and the evaluate / compare / gen commands.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kpeval/harness.hpp"
#include "kpeval/ingest.hpp"
#include "kpeval/log.hpp"
#include "kpeval/select.hpp"

namespace kpeval {

struct MethodSpec {
  std::string name;
  std::filesystem::path path;
  FormatKind format = FormatKind::CanonicalJson;
  /// `builtin:<name>` or a schema file.
  std::string schema = "builtin:coco17";
};

/// Parses `<name>=<path>:<format>:<schema>`; the schema part may itself
/// contain ':' (builtin:openpose18).
MethodSpec parse_method_spec(std::string_view text);

struct RunConfig {
  std::vector<std::filesystem::path> gt_paths;
  FormatKind gt_format = FormatKind::CanonicalJson;
  std::vector<MethodSpec> methods;
  SelectionStrategy selection = SelectionStrategy::FirstRank;
  EvalScope scope = EvalScope::Infant;
  std::optional<NormalizationMode> normalization;
  std::optional<std::filesystem::path> sigma_path;
  double cpe_c = 0.5;
  std::filesystem::path out_dir = "kpeval-out";
  bool emit_tables = true;
  bool emit_circles = false;
  bool emit_per_sequence = false;
  std::optional<std::filesystem::path> reference_pose;
  int jobs = 1;
  std::string dataset_id;
  std::string input_mode;

  /// Throws ConfigError for missing paths, duplicate method names and
  /// out-of-range values.
  void validate() const;
};

/// Declarative text: `key = value` lines followed by `[method <name>]`
/// blocks holding `det`, `format` and `schema`. Relative paths resolve
/// against `base_dir`.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir,
                           std::string_view source_name = "<config>");

/// Applies `tables,circles,per-sequence`.
void apply_emit_list(RunConfig& config, std::string_view list);

struct EvaluateSummary {
  int reports = 0;
  int warnings = 0;
  std::vector<std::filesystem::path> files;
};

EvaluateSummary cmd_evaluate(const RunConfig& config, Logger& log);

enum class CompareMetric { Oks, Ap, Ar, Nmh, Missing, Redundant, Cpe, Rho };

std::optional<CompareMetric> compare_metric_from_string(std::string_view text) noexcept;

/// Method-by-dataset matrix for one metric; the best cell of every row is
/// suffixed with '*', ties included. Throws SchemaMismatch when report
/// versions differ.
std::string cmd_compare(const std::vector<std::filesystem::path>& reports, CompareMetric metric);

/// Writes ground_truth.json, detections.json and expected.json.
std::vector<std::filesystem::path> cmd_gen(std::uint64_t seed, int frames, const ErrorModel& model,
                                           const std::filesystem::path& out_dir,
                                           const std::string& sequence_id = "synthetic");

/// Entry point shared by the executable and the tests. Exit status: 0 on
/// success, 1 on a hard error, 2 on a configuration or usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kpeval
