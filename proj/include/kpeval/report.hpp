#pragma once

/// \file report.hpp
/// \brief Aggregation of per-frame results into per-method tables, table
/// emission (CSV / JSON) and the per-keypoint error-circle figure.

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kpeval/core.hpp"
#include "kpeval/ingest.hpp"
#include "kpeval/pipeline.hpp"
#include "kpeval/stats.hpp"

namespace kpeval {

enum class Grouping { Dataset, Sequence };

struct ReportCounts {
  int sequences = 0;
  int frames = 0;
  /// Evaluated ground truths.
  int targets = 0;
  int detections = 0;
  int matched_pairs = 0;
  int missing_detections = 0;
  long long missing_keypoints = 0;

  friend bool operator==(const ReportCounts&, const ReportCounts&) = default;
};

/// Means of the per-sequence values, next to the pooled ones. Only filled
/// on dataset-level reports.
struct SequenceMeans {
  std::optional<double> mean_oks;
  std::optional<double> nmh_overall;
  std::optional<double> missing_percent;
  int n = 0;

  friend bool operator==(const SequenceMeans&, const SequenceMeans&) = default;
};

struct MetricReport {
  std::string method_name;
  std::string dataset_id;
  std::string input_mode;
  /// Empty for dataset-level reports.
  std::string sequence_id;
  std::string selection;
  std::string scope;

  std::optional<MeanStd> mean_oks;
  std::optional<double> ap;
  std::optional<double> ar;
  /// Percent of the Neck-MidHip length.
  std::optional<MeanStd> nmh_overall;
  std::array<std::optional<MeanStd>, kNumKeypoints> nmh_per_keypoint{};
  std::optional<double> missing_percent;
  std::optional<double> redundant_percent;
  bool multi_person_caveat = false;
  std::optional<double> cpe;
  std::optional<double> spearman_rho;
  std::optional<double> spearman_p;
  int spearman_n = 0;
  ReportCounts counts;
  std::optional<SequenceMeans> sequence_means;

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

struct AggregateOptions {
  Grouping grouping = Grouping::Dataset;
  std::string dataset_id = "dataset";
  std::string input_mode;
  std::string selection = "first";
  std::string scope = "infant";
  double cpe_c = 0.5;
};

struct AggregateResult {
  std::vector<MetricReport> reports;
  std::vector<Warning> warnings;
};

/// One report per (method, group). Methods keep their first-appearance
/// order; sequences and frames are reduced in sorted id order, so the
/// result does not depend on input order.
AggregateResult aggregate(std::span<const SequenceEvaluation> evaluations, const AggregateOptions& options);

/// Provenance written with every table.
struct ReportMeta {
  std::string version;
  std::string sigma_hash;
  double cpe_c = 0.5;
  std::string stddev = "sample";

  friend bool operator==(const ReportMeta&, const ReportMeta&) = default;
};

enum class TableFormat { Csv, Json };

/// Numbers are rounded to the table precision: OKS and CPE 2 decimals,
/// AP/AR, NMH, missing and redundant percentages 1, rho 2, p 4.
std::string render_csv(std::span<const MetricReport> reports, const ReportMeta& meta);
std::string render_json(std::span<const MetricReport> reports, const ReportMeta& meta);
void emit_tables(std::span<const MetricReport> reports, const ReportMeta& meta, TableFormat format,
                 const std::filesystem::path& path);

struct ParsedReports {
  ReportMeta meta;
  std::vector<MetricReport> reports;
};

/// Inverse of render_json / render_csv, up to the rendering precision.
ParsedReports parse_json_report(std::string_view text, std::string_view source_name = "<report>");
ParsedReports parse_csv_report(std::string_view text, std::string_view source_name = "<report>");

// ---------------------------------------------------------------- circle plot

struct FigurePoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const FigurePoint&, const FigurePoint&) = default;
};

struct ReferencePose {
  double width = 0.0;
  double height = 0.0;
  std::array<std::optional<FigurePoint>, kNumKeypoints> keypoints{};

  /// Neck-MidHip distance in figure units. Throws NoNormalizer when either
  /// shoulder or hip is missing.
  double torso_length() const;
};

/// Supine infant seen from above, 400 x 520 figure units.
ReferencePose default_reference_pose();

/// Text format: `width = W`, `height = H`, then `<keypoint> = x y` lines.
ReferencePose parse_reference_pose(std::string_view text, std::string_view source_name = "<pose>");
ReferencePose load_reference_pose(const std::filesystem::path& path);

struct CircleSeries {
  std::string method_name;
  /// Mean error per keypoint as a fraction of the torso length.
  std::array<std::optional<double>, kNumKeypoints> error{};
  /// Empty picks from the built-in palette.
  std::string color;
};

struct CirclePlotSpec {
  std::string title;
  ReferencePose reference;
  std::vector<CircleSeries> series;
};

/// Series from dataset-level reports (per-keypoint NMH means / 100).
CirclePlotSpec circle_plot_from_reports(std::span<const MetricReport> reports, const ReferencePose& reference,
                                        std::string title = {});

std::string render_circle_plot(const CirclePlotSpec& spec);
void emit_circle_plot(const CirclePlotSpec& spec, const std::filesystem::path& path);

/// Distinct colors, cycled.
std::string_view palette_color(std::size_t i) noexcept;

}  // namespace kpeval
